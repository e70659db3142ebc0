#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "fcr/llm/chat.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include <cstdlib>
#include <json.hpp>
#include <thread>

#include "fcr/error.hpp"

namespace fcr::llm {

using nlohmann::json;

void ChatEndpointConfig::validate() const {
  if (base_url.empty()) throw ConfigError("chat endpoint base_url is empty");
  if (base_url.rfind("http://", 0) != 0 && base_url.rfind("https://", 0) != 0) {
    throw ConfigError(fmt::format("chat endpoint base_url \"{}\" is not http(s)", base_url));
  }
  if (model_name.empty()) throw ConfigError("chat endpoint model name is empty");
  if (!(timeout_seconds > 0.0)) throw ConfigError("chat endpoint timeout must be positive");
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (max_concurrent_requests < 1) throw ConfigError("max_concurrent_requests must be >= 1");
}

std::string build_chat_request(const std::string& model, std::span<const ChatMessage> messages,
                               double temperature) {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return json{{"model", model}, {"messages", std::move(msgs)}, {"temperature", temperature}}.dump();
}

std::string parse_chat_response(const std::string& body) {
  try {
    const auto j = json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw TransportError(fmt::format("malformed chat-completion response: {}", e.what()));
  }
}

HttpChatClient::HttpChatClient(ChatEndpointConfig config) : config_(std::move(config)) {
  config_.validate();
  if (!config_.api_key_env_var.empty()) {
    const char* key = std::getenv(config_.api_key_env_var.c_str());
    if (!key || !*key) {
      throw ConfigError(fmt::format("environment variable {} holding the API key is not set",
                                    config_.api_key_env_var));
    }
    api_key_ = key;
  }
  std::string url = config_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  const auto scheme_end = url.find("://") + 3;
  const auto path_start = url.find('/', scheme_end);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = (path_start == std::string::npos ? std::string() : url.substr(path_start)) +
          "/chat/completions";
  in_flight_ = std::make_unique<std::counting_semaphore<>>(config_.max_concurrent_requests);
}

std::string HttpChatClient::complete(std::span<const ChatMessage> messages) {
  const auto body = build_chat_request(config_.model_name, messages, config_.temperature);
  in_flight_->acquire();
  struct Release {
    std::counting_semaphore<>* s;
    ~Release() { s->release(); }
  } release{in_flight_.get()};

  httplib::Client client(scheme_host_port_);
  const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto res = client.Post(path_, headers, body, "application/json");
  if (!res) {
    throw TransportError(fmt::format("POST {}{} failed: {}", scheme_host_port_, path_,
                                     httplib::to_string(res.error())));
  }
  if (res->status != 200) {
    throw TransportError(fmt::format("POST {}{} returned HTTP {}", scheme_host_port_, path_, res->status));
  }
  return parse_chat_response(res->body);
}

std::string complete_with_retries(ChatClient& client, std::span<const ChatMessage> messages,
                                  const RetryPolicy& policy) {
  auto backoff = policy.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    try {
      return client.complete(messages);
    } catch (const TransportError&) {
      if (attempt >= policy.max_retries) throw;
    }
    if (backoff.count() > 0) std::this_thread::sleep_for(backoff);
    backoff = std::chrono::milliseconds(
        static_cast<long long>(static_cast<double>(backoff.count()) * policy.backoff_multiplier));
  }
}

}  // namespace fcr::llm
