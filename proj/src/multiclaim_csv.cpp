#include "fcr/multiclaim_csv.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <variant>

#include "fcr/error.hpp"
#include "fcr/text_util.hpp"

namespace fcr::multiclaim {

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool row_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        row_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        row_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_started || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        field.clear();
        row.clear();
        row_started = false;
        break;
      default:
        field.push_back(c);
        row_started = true;
    }
  }
  if (quoted) throw ValidationError("CSV ends inside a quoted field");
  if (row_started || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

// Minimal Python literal reader: strings, numbers, tuples and lists.
struct PyValue;
using PyList = std::vector<PyValue>;
struct PyValue {
  std::variant<std::monostate, std::string, double, PyList> v;
};

class LiteralReader {
 public:
  explicit LiteralReader(std::string_view text) : text_(text) {}

  PyValue read_all() {
    skip_space();
    if (pos_ == text_.size()) return {};
    PyValue v = read_value();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return v;
  }

 private:
  [[noreturn]] void fail(const char* what) const {
    throw ValidationError(fmt::format("malformed literal at offset {}: {}", pos_, what));
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\t' || text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  PyValue read_value() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end");
    const char c = text_[pos_];
    if (c == '(' || c == '[') return read_sequence(c == '(' ? ')' : ']');
    if (c == '\'' || c == '"') return PyValue{read_string()};
    if (text_.substr(pos_, 4) == "None") {
      pos_ += 4;
      return {};
    }
    return PyValue{read_number()};
  }

  PyValue read_sequence(char close) {
    ++pos_;
    PyList items;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) fail("unterminated sequence");
      if (text_[pos_] == close) {
        ++pos_;
        return PyValue{std::move(items)};
      }
      items.push_back(read_value());
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
    }
  }

  static void append_utf8(std::string& out, unsigned cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }

  unsigned read_hex(std::size_t digits) {
    if (pos_ + digits > text_.size()) fail("short escape");
    unsigned value = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      const char h = text_[pos_++];
      value <<= 4;
      if (h >= '0' && h <= '9') value |= static_cast<unsigned>(h - '0');
      else if (h >= 'a' && h <= 'f') value |= static_cast<unsigned>(h - 'a' + 10);
      else if (h >= 'A' && h <= 'F') value |= static_cast<unsigned>(h - 'A' + 10);
      else fail("bad hex digit");
    }
    return value;
  }

  std::string read_string() {
    const char quote = text_[pos_++];
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) fail("unterminated string");
      const char c = text_[pos_++];
      if (c == quote) return out;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (pos_ >= text_.size()) fail("dangling escape");
      const char e = text_[pos_++];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case '\\': out.push_back('\\'); break;
        case '\'': out.push_back('\''); break;
        case '"': out.push_back('"'); break;
        case 'x': append_utf8(out, read_hex(2)); break;
        case 'u': append_utf8(out, read_hex(4)); break;
        case 'U': append_utf8(out, read_hex(8)); break;
        default:
          out.push_back('\\');
          out.push_back(e);
      }
    }
  }

  double read_number() {
    const auto start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '.' || text_[pos_] == '-' ||
                                   text_[pos_] == '+' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
    }
    if (start == pos_) fail("unexpected character");
    try {
      return std::stod(std::string(text_.substr(start, pos_ - start)));
    } catch (const std::exception&) {
      fail("bad number");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

const std::string* as_string(const PyValue& v) { return std::get_if<std::string>(&v.v); }
const PyList* as_list(const PyValue& v) { return std::get_if<PyList>(&v.v); }

TextTuple to_tuple(const PyValue& value) {
  TextTuple out;
  const auto* items = as_list(value);
  if (!items) throw ValidationError("text cell is not a tuple");
  if (items->size() > 0) {
    if (const auto* s = as_string((*items)[0])) out.original = *s;
  }
  if (items->size() > 1) {
    if (const auto* s = as_string((*items)[1])) out.translation = *s;
  }
  if (items->size() > 2) {
    double best = -1.0;
    if (const auto* langs = as_list((*items)[2])) {
      for (const auto& entry : *langs) {
        const auto* pair = as_list(entry);
        if (!pair || pair->empty()) continue;
        const auto* code = as_string((*pair)[0]);
        double p = 0.0;
        if (pair->size() > 1) {
          if (const auto* d = std::get_if<double>(&(*pair)[1].v)) p = *d;
        }
        if (code && p > best) {
          best = p;
          out.language = *code;
        }
      }
    }
  }
  return out;
}

std::size_t column(const std::vector<std::string>& header, std::string_view name,
                   const std::string& file) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ValidationError(fmt::format("{}: missing column \"{}\"", file, name));
  return static_cast<std::size_t>(it - header.begin());
}

std::string join_nonempty(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out.push_back('\n');
    out += p;
  }
  return out;
}

std::optional<std::string> nonempty(std::string s) {
  if (s.empty()) return std::nullopt;
  return s;
}

std::string normalize_language(std::string code) {
  std::transform(code.begin(), code.end(), code.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return is_valid_language_code(code) ? code : std::string("und");
}

}  // namespace

TextTuple parse_text_tuple(std::string_view literal) {
  auto value = LiteralReader(trim(literal)).read_all();
  if (std::holds_alternative<std::monostate>(value.v)) return {};
  return to_tuple(value);
}

std::vector<TextTuple> parse_text_tuple_list(std::string_view literal) {
  auto value = LiteralReader(trim(literal)).read_all();
  std::vector<TextTuple> out;
  if (std::holds_alternative<std::monostate>(value.v)) return out;
  const auto* items = as_list(value);
  if (!items) throw ValidationError("ocr cell is not a list");
  for (const auto& item : *items) out.push_back(to_tuple(item));
  return out;
}

Converted convert(const std::string& posts_csv, const std::string& fact_checks_csv,
                  const std::string& pairs_csv) {
  Converted out;
  std::unordered_set<std::string> post_ids;
  std::unordered_set<std::string> fact_check_ids;

  {
    const auto rows = parse_csv(read_file(posts_csv));
    if (rows.empty()) throw ValidationError(fmt::format("{}: empty file", posts_csv));
    const auto id_col = column(rows[0], "post_id", posts_csv);
    const auto text_col = column(rows[0], "text", posts_csv);
    const auto ocr_col = column(rows[0], "ocr", posts_csv);
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      try {
        if (row.size() <= std::max({id_col, text_col, ocr_col})) throw ValidationError("short row");
        const auto text = parse_text_tuple(row[text_col]);
        const auto ocr = parse_text_tuple_list(row[ocr_col]);
        std::vector<std::string> ocr_original;
        std::vector<std::string> ocr_translated;
        std::string language = text.language;
        for (const auto& t : ocr) {
          ocr_original.push_back(normalize_whitespace(t.original));
          ocr_translated.push_back(normalize_whitespace(t.translation));
          if (language.empty()) language = t.language;
        }
        Post post{std::string(trim(row[id_col])), normalize_whitespace(text.original),
                  nonempty(join_nonempty(ocr_original)), std::nullopt,
                  normalize_language(language)};
        std::vector<std::string> translated{normalize_whitespace(text.translation)};
        translated.insert(translated.end(), ocr_translated.begin(), ocr_translated.end());
        post.translated_text = nonempty(join_nonempty(translated));
        if (post.id.empty() || (post.original_text.empty() && !post.ocr_text)) {
          throw ValidationError("empty post");
        }
        if (!post_ids.insert(post.id).second) throw ValidationError("duplicate id");
        out.posts.push_back(std::move(post));
      } catch (const ValidationError&) {
        ++out.stats.skipped_rows;
      }
    }
  }
  {
    const auto rows = parse_csv(read_file(fact_checks_csv));
    if (rows.empty()) throw ValidationError(fmt::format("{}: empty file", fact_checks_csv));
    const auto id_col = column(rows[0], "fact_check_id", fact_checks_csv);
    const auto claim_col = column(rows[0], "claim", fact_checks_csv);
    const auto title_col = column(rows[0], "title", fact_checks_csv);
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      try {
        if (row.size() <= std::max({id_col, claim_col, title_col})) throw ValidationError("short row");
        const auto claim = parse_text_tuple(row[claim_col]);
        const auto title = parse_text_tuple(row[title_col]);
        FactCheck fc{std::string(trim(row[id_col])), normalize_whitespace(claim.original),
                     nonempty(normalize_whitespace(title.original)),
                     nonempty(normalize_whitespace(claim.translation)),
                     normalize_language(claim.language.empty() ? title.language : claim.language)};
        if (fc.id.empty() || fc.claim.empty()) throw ValidationError("empty fact-check");
        if (!fact_check_ids.insert(fc.id).second) throw ValidationError("duplicate id");
        out.fact_checks.push_back(std::move(fc));
      } catch (const ValidationError&) {
        ++out.stats.skipped_rows;
      }
    }
  }
  {
    const auto rows = parse_csv(read_file(pairs_csv));
    if (rows.empty()) throw ValidationError(fmt::format("{}: empty file", pairs_csv));
    const auto fc_col = column(rows[0], "fact_check_id", pairs_csv);
    const auto post_col = column(rows[0], "post_id", pairs_csv);
    std::unordered_set<std::string> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() <= std::max(fc_col, post_col)) {
        ++out.stats.skipped_rows;
        continue;
      }
      RelevancePair pair{std::string(trim(row[post_col])), std::string(trim(row[fc_col]))};
      if (!post_ids.count(pair.post_id) || !fact_check_ids.count(pair.fact_check_id) ||
          !seen.insert(pair.post_id + '\x1f' + pair.fact_check_id).second) {
        ++out.stats.skipped_rows;
        continue;
      }
      out.pairs.push_back(std::move(pair));
    }
  }
  out.stats.posts = out.posts.size();
  out.stats.fact_checks = out.fact_checks.size();
  out.stats.pairs = out.pairs.size();
  return out;
}

}  // namespace fcr::multiclaim
