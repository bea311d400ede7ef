#pragma once

// Chat endpoint contract.
//
// Request (POST {base_url}/chat/completions, Content-Type: application/json,
// `Authorization: Bearer <key>` when a key is configured):
//
//   {"messages":[{"content":"...","role":"system"},
//                {"content":"...","role":"user"}, ...],
//    "model":"<model>","temperature":0.4}
//
// Response: the first choice's message content is taken as the reply:
//
//   {"choices":[{"index":0,"message":{"role":"assistant","content":"..."}}]}

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace specgen {

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;

  friend bool operator==(const ChatMessage &, const ChatMessage &) = default;
};

struct ChatRequest {
  std::string model;
  double temperature = 0.4;
  std::vector<ChatMessage> messages;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  /// Returns the assistant reply. Throws EndpointError.
  virtual std::string complete(const ChatRequest &request) = 0;
};

/// Request body, serialised with sorted keys.
std::string chat_request_body(const ChatRequest &request);
/// Assistant content from a response body. Throws EndpointError.
std::string parse_chat_response(const std::string &body);

struct EndpointConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.4;
  int max_rounds = 10;
  int shot_count = 4;
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::seconds request_timeout{120};
  int retry_count = 3;
  std::chrono::milliseconds retry_backoff{1000};
  /// Oldest few-shot pairs are dropped once the history exceeds this many
  /// estimated tokens (characters / 4). Zero disables the cap.
  std::size_t token_budget = 32000;

  /// Throws ConfigError.
  void validate() const;
};

class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(EndpointConfig cfg);
  std::string complete(const ChatRequest &request) override;

 private:
  EndpointConfig cfg_;
};

/// Replays canned replies in order and records every request.
class ScriptedChatClient : public ChatClient {
 public:
  explicit ScriptedChatClient(std::vector<std::string> responses);
  std::string complete(const ChatRequest &request) override;

  const std::vector<ChatRequest> &requests() const { return requests_; }

 private:
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
  std::vector<ChatRequest> requests_;
};

/// Fixture file: {"scripts":[{"responses":["...", ...]}, ...]} or a single
/// {"responses":[...]}. One script per pipeline attempt.
std::vector<std::vector<std::string>> load_chat_scripts(const std::filesystem::path &path);

}  // namespace specgen
