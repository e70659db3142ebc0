#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <thread>

#include "fcr/error.hpp"
#include "fcr/llm/cache.hpp"
#include "fcr/llm/chat.hpp"
#include "mocks.hpp"

using namespace fcr;
using namespace fcr::llm;
using nlohmann::json;

namespace {

class MockServer {
 public:
  MockServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      last_body_ = req.body;
      last_auth_ = req.get_header_value("Authorization");
      if (failures_left_ > 0) {
        --failures_left_;
        res.status = 503;
        return;
      }
      const auto body = json::parse(req.body);
      const auto reply = "echo:" + body["messages"].back()["content"].get<std::string>();
      res.set_content(json{{"choices", {{{"message", {{"role", "assistant"}, {"content", reply}}}}}}}.dump(),
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

  std::atomic<int> requests_{0};
  std::atomic<int> failures_left_{0};
  std::string last_body_;
  std::string last_auth_;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("request body and response parsing") {
  const std::vector<ChatMessage> msgs{{"system", "s"}, {"user", "u"}};
  const auto body = json::parse(build_chat_request("m", msgs, 0.0));
  CHECK(body["model"] == "m");
  CHECK(body["messages"].size() == 2);
  CHECK(body["messages"][1]["content"] == "u");
  CHECK(body["temperature"] == 0.0);

  CHECK(parse_chat_response(R"({"choices":[{"message":{"content":"hi"}}]})") == "hi");
  CHECK_THROWS_AS(parse_chat_response("{}"), TransportError);
  CHECK_THROWS_AS(parse_chat_response("not json"), TransportError);
  CHECK_THROWS_AS(parse_chat_response(R"({"choices":[]})"), TransportError);
}

TEST_CASE("endpoint validation") {
  ChatEndpointConfig cfg{"http://x/v1", "m"};
  CHECK_NOTHROW(cfg.validate());
  cfg.base_url = "ftp://x";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.base_url = "http://x";
  cfg.model_name = "";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.model_name = "m";
  cfg.max_concurrent_requests = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("HTTP client speaks the chat-completion wire format") {
  MockServer server;
  ::setenv("FCR_TEST_API_KEY", "sk-test", 1);
  ChatEndpointConfig cfg{server.base_url(), "qwen", "FCR_TEST_API_KEY", 5.0, 0, 2, 0.0};
  HttpChatClient client(cfg);
  const std::vector<ChatMessage> msgs{{"user", "ping"}};
  CHECK(client.complete(msgs) == "echo:ping");
  CHECK(server.last_auth_ == "Bearer sk-test");
  CHECK(json::parse(server.last_body_)["model"] == "qwen");

  server.failures_left_ = 2;
  CHECK_THROWS_AS(client.complete(msgs), TransportError);
  const RetryPolicy retry{3, std::chrono::milliseconds(1), 2.0};
  const int before = server.requests_;
  CHECK(complete_with_retries(client, msgs, retry) == "echo:ping");
  CHECK(server.requests_ - before == 2);

  server.failures_left_ = 10;
  CHECK_THROWS_AS(complete_with_retries(client, msgs, RetryPolicy{1, std::chrono::milliseconds(0), 2.0}),
                  TransportError);
  server.failures_left_ = 0;
}

TEST_CASE("HTTP client failures") {
  ::unsetenv("FCR_TEST_MISSING_KEY");
  CHECK_THROWS_AS(HttpChatClient(ChatEndpointConfig{"http://127.0.0.1:9/v1", "m", "FCR_TEST_MISSING_KEY"}),
                  ConfigError);
  HttpChatClient unreachable(ChatEndpointConfig{"http://127.0.0.1:9/v1", "m", "", 1.0});
  const std::vector<ChatMessage> msgs{{"user", "x"}};
  CHECK_THROWS_AS(unreachable.complete(msgs), TransportError);
}

TEST_CASE("response cache") {
  const auto dir = testing::temp_dir("cache");
  const ResponseCache cache(dir + "/nested");
  const auto k1 = cache_key("v1", "m", "input");
  CHECK(k1.size() == 64);
  CHECK(k1 == cache_key("v1", "m", "input"));
  CHECK(k1 != cache_key("v2", "m", "input"));
  CHECK(k1 != cache_key("v1", "m2", "input"));
  CHECK(k1 != cache_key("v1", "m", "input "));
  CHECK(cache_key("a", "bc", "") != cache_key("ab", "c", ""));
  CHECK_FALSE(cache.get(k1).has_value());
  cache.put(k1, "response\twith\nbytes");
  CHECK(cache.get(k1) == "response\twith\nbytes");
  CHECK_THROWS_AS(cache.get("../etc/passwd"), Error);
  std::filesystem::remove_all(dir);
}
