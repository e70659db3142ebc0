#include "mocks.hpp"

#include <filesystem>
#include <random>
#include <sstream>

#include "fcr/error.hpp"

namespace fcr::testing {

namespace fs = std::filesystem;

std::vector<std::string> prompt_candidate_ids(const std::string& prompt) {
  std::vector<std::string> ids;
  std::istringstream in(prompt);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("ID: ", 0) == 0) ids.push_back(line.substr(4));
  }
  return ids;
}

std::string prompt_query(const std::string& prompt) {
  static const std::string open = "## Query for fact-checking: ";
  static const std::string close = "\n## Data Augmentations:";
  const auto begin = prompt.find(open);
  if (begin == std::string::npos) return {};
  const auto start = begin + open.size();
  return prompt.substr(start, prompt.find(close, start) - start);
}

std::string ScriptedClient::complete(std::span<const llm::ChatMessage> messages) {
  ++calls_;
  return respond_(messages.empty() ? std::string() : messages.back().content);
}

namespace {

std::string tab_join(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += '\t';
    out += id;
  }
  return out;
}

}  // namespace

ScriptedClient::Responder identity_reranker() {
  return [](const std::string& prompt) { return tab_join(prompt_candidate_ids(prompt)); };
}

ScriptedClient::Responder gold_first_reranker(std::map<std::string, std::set<std::string>> gold_by_query) {
  return [gold_by_query = std::move(gold_by_query)](const std::string& prompt) {
    const auto ids = prompt_candidate_ids(prompt);
    const auto it = gold_by_query.find(prompt_query(prompt));
    std::vector<std::string> front, back;
    for (const auto& id : ids) {
      (it != gold_by_query.end() && it->second.count(id) ? front : back).push_back(id);
    }
    front.insert(front.end(), back.begin(), back.end());
    return tab_join(front);
  };
}

ScriptedClient::Responder garbage_responder() {
  return [](const std::string&) { return std::string("I'm sorry, I cannot help with ranking these articles."); };
}

ScriptedClient::Responder failing_responder() {
  return [](const std::string&) -> std::string { throw TransportError("connection refused"); };
}

ScriptedClient::Responder echo_translator() {
  return [](const std::string& text) { return "EN: " + text; };
}

ChatClientFactory MockFactory::factory() const {
  return [respond = respond, created = created, calls = calls](const llm::ChatEndpointConfig& cfg) {
    ++*created;
    auto counting = [respond, calls](const std::string& msg) {
      ++*calls;
      return respond(msg);
    };
    return std::make_unique<ScriptedClient>(counting, cfg.model_name);
  };
}

std::string temp_dir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  const auto dir = fs::temp_directory_path() /
                   ("fcr-test-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string data_dir() { return FCR_TEST_DATA_DIR; }

}  // namespace fcr::testing
