#pragma once

#include <chrono>
#include <memory>
#include <semaphore>
#include <span>
#include <string>
#include <vector>

namespace fcr::llm {

struct ChatMessage {
  std::string role;
  std::string content;
};

/// OpenAI-style chat-completion endpoint. The API key never lives in config;
/// only the name of the environment variable holding it does.
struct ChatEndpointConfig {
  std::string base_url;  // e.g. http://localhost:8000/v1
  std::string model_name;
  std::string api_key_env_var;  // empty: no Authorization header
  double timeout_seconds = 120.0;
  int max_retries = 3;
  int max_concurrent_requests = 4;
  double temperature = 0.0;

  /// Throws ConfigError when an invariant is broken.
  void validate() const;
};

/// One chat completion. Implementations must be safe to call from several
/// threads at once and report failures as TransportError.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(std::span<const ChatMessage> messages) = 0;
  virtual std::string model_name() const = 0;
};

/// JSON body of a chat-completion request.
std::string build_chat_request(const std::string& model, std::span<const ChatMessage> messages,
                               double temperature);
/// choices[0].message.content of a chat-completion response. Throws
/// TransportError on anything else.
std::string parse_chat_response(const std::string& body);

class HttpChatClient : public ChatClient {
 public:
  /// Resolves the API key from the environment; throws ConfigError when the
  /// named variable is unset.
  explicit HttpChatClient(ChatEndpointConfig config);

  std::string complete(std::span<const ChatMessage> messages) override;
  std::string model_name() const override { return config_.model_name; }

 private:
  ChatEndpointConfig config_;
  std::string scheme_host_port_;
  std::string path_;
  std::string api_key_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  double backoff_multiplier = 2.0;
};

/// Up to max_retries + 1 attempts with exponential backoff between them.
/// Rethrows the last TransportError when every attempt fails.
std::string complete_with_retries(ChatClient& client, std::span<const ChatMessage> messages,
                                  const RetryPolicy& policy);

}  // namespace fcr::llm
