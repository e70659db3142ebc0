#include "fcr/llm/cache.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fcr/error.hpp"
#include "fcr/hashing.hpp"
#include "fcr/text_util.hpp"

namespace fcr::llm {

std::string cache_key(std::string_view template_version, std::string_view model,
                      std::string_view input) {
  std::string material;
  material.reserve(template_version.size() + model.size() + input.size() + 2);
  material.append(template_version).push_back('\0');
  material.append(model).push_back('\0');
  material.append(input);
  return sha256_hex(material);
}

ResponseCache::ResponseCache(std::string directory) : directory_(std::move(directory)) {
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec) throw IoError(fmt::format("cannot create cache directory {}: {}", directory_, ec.message()));
}

std::string ResponseCache::path_for(const std::string& key) const {
  if (key.empty() || key.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw Error(fmt::format("invalid cache key \"{}\"", key));
  }
  return (std::filesystem::path(directory_) / key).string();
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ResponseCache::put(const std::string& key, std::string_view value) const {
  write_file_atomic(path_for(key), value);
}

}  // namespace fcr::llm
