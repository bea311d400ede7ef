#include <httplib.h>

#include "specgen/chat.hpp"

#include "specgen/errors.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <thread>

namespace specgen {

using nlohmann::json;

std::string chat_request_body(const ChatRequest &request) {
  json messages = json::array();
  for (const auto &m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  json body = {{"model", request.model}, {"temperature", request.temperature}, {"messages", messages}};
  return body.dump();
}

std::string parse_chat_response(const std::string &body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error &e) {
    throw EndpointError(std::string("malformed chat response: ") + e.what());
  }
  if (j.contains("error")) throw EndpointError("endpoint error: " + j["error"].dump());
  if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
    throw EndpointError("chat response has no choices");
  }
  const auto &choice = j["choices"][0];
  if (!choice.contains("message") || !choice["message"].contains("content") ||
      !choice["message"]["content"].is_string()) {
    throw EndpointError("chat response choice has no message content");
  }
  return choice["message"]["content"].get<std::string>();
}

void EndpointConfig::validate() const {
  if (temperature < 0.0 || temperature > 2.0) throw ConfigError("endpoint.temperature must be in [0, 2]");
  if (max_rounds < 1) throw ConfigError("endpoint.max_rounds must be at least 1");
  if (shot_count < 0) throw ConfigError("endpoint.shot_count must be non-negative");
  if (retry_count < 0) throw ConfigError("endpoint.retry_count must be non-negative");
}

HttpChatClient::HttpChatClient(EndpointConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

std::string HttpChatClient::complete(const ChatRequest &request) {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(cfg_.base_url, m, url_re)) {
    throw EndpointError("endpoint.base_url is not an http(s) URL: " + cfg_.base_url);
  }
  std::string origin = m[1].str();
  std::string prefix = m[2].matched ? m[2].str() : "";
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  httplib::Client client(origin);
  client.set_connection_timeout(cfg_.request_timeout);
  client.set_read_timeout(cfg_.request_timeout);
  client.set_write_timeout(cfg_.request_timeout);

  httplib::Headers headers;
  if (const char *key = std::getenv(cfg_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::string body = chat_request_body(request);
  std::string last_error;
  for (int attempt = 0; attempt <= cfg_.retry_count; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(cfg_.retry_backoff * (1 << (attempt - 1)));
    auto res = client.Post(prefix + "/chat/completions", headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return parse_chat_response(res->body);
    last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500);
    bool retryable = res->status == 429 || res->status >= 500;
    if (!retryable) break;
  }
  throw EndpointError("chat request failed after retries: " + last_error);
}

ScriptedChatClient::ScriptedChatClient(std::vector<std::string> responses) : responses_(std::move(responses)) {}

std::string ScriptedChatClient::complete(const ChatRequest &request) {
  requests_.push_back(request);
  if (next_ >= responses_.size()) {
    throw EndpointError("scripted chat client has no reply left for request " + std::to_string(next_ + 1));
  }
  return responses_[next_++];
}

std::vector<std::vector<std::string>> load_chat_scripts(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open chat script " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ConfigError("chat script " + path.string() + ": " + e.what());
  }
  auto read_script = [&](const json &s) {
    if (!s.contains("responses") || !s["responses"].is_array()) {
      throw ConfigError("chat script " + path.string() + ": each script needs a responses array");
    }
    std::vector<std::string> out;
    for (const auto &r : s["responses"]) out.push_back(r.get<std::string>());
    return out;
  };
  std::vector<std::vector<std::string>> scripts;
  if (j.contains("scripts")) {
    for (const auto &s : j["scripts"]) scripts.push_back(read_script(s));
  } else {
    scripts.push_back(read_script(j));
  }
  if (scripts.empty()) throw ConfigError("chat script " + path.string() + " holds no scripts");
  return scripts;
}

}  // namespace specgen
