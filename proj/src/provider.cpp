#include "tokbias/provider.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "tokbias/error.hpp"
#include "tokbias/hash.hpp"

namespace tokbias {

void MockProvider::add_rule(MockRule rule) { rules_.push_back(std::move(rule)); }

std::vector<ChatRequest> MockProvider::requests() const {
  std::lock_guard lock(log_mutex_);
  return log_;
}

std::string MockProvider::complete(const ChatRequest& request) {
  ++calls_;
  const auto now = ++in_flight_;
  auto seen = max_in_flight_.load();
  while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
  }
  struct Leave {
    std::atomic<std::size_t>& n;
    ~Leave() { --n; }
  } leave{in_flight_};

  {
    std::lock_guard lock(log_mutex_);
    log_.push_back(request);
  }
  if (latency_.count() > 0) std::this_thread::sleep_for(latency_);

  auto remaining = fail_remaining_.load();
  while (remaining > 0) {
    const auto next = remaining == static_cast<std::size_t>(-1) ? remaining : remaining - 1;
    if (fail_remaining_.compare_exchange_weak(remaining, next)) {
      throw Error(Errc::ProviderError, "mock failure");
    }
  }

  const std::string prompt = request.messages.empty() ? std::string{} : request.messages.back().content;
  for (const auto& rule : rules_) {
    if (!rule.model.empty() && rule.model != request.model) continue;
    if (!rule.prompt_contains.empty() && prompt.find(rule.prompt_contains) == std::string::npos) {
      continue;
    }
    return rule.response;
  }
  char temp[32];
  std::snprintf(temp, sizeof temp, "%.6f", request.temperature);
  return "mock:" + request.model + ":" +
         stable_hash(std::to_string(seed_) + "\n" + request.model + "\n" + temp + "\n" + prompt);
}

std::string chat_request_body(const ChatRequest& request) {
  nlohmann::ordered_json j;
  j["model"] = request.model;
  auto& messages = j["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  j["temperature"] = request.temperature;
  return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

std::string parse_chat_response(std::string_view body) {
  try {
    const auto j = nlohmann::json::parse(body);
    if (j.contains("error") && !j.at("error").is_null()) {
      throw Error(Errc::ProviderError, j.at("error").dump());
    }
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (content.is_null()) throw Error(Errc::ProviderError, "empty message content");
    return content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ProviderError, std::string("unparseable response: ") + e.what());
  }
}

OpenAICompatibleProvider::OpenAICompatibleProvider(HttpProviderOptions options)
    : options_(std::move(options)) {
  if (!options_.api_key_env.empty()) {
    if (const char* key = std::getenv(options_.api_key_env.c_str()); key && *key) api_key_ = key;
  }
}

std::string OpenAICompatibleProvider::complete(const ChatRequest& request) {
  // One client per call: httplib clients are not safe for concurrent use.
  httplib::Client client(options_.base_url);
  client.set_connection_timeout(options_.timeout_seconds);
  client.set_read_timeout(options_.timeout_seconds);
  client.set_write_timeout(options_.timeout_seconds);
  httplib::Headers headers;
  if (api_key_) headers.emplace("Authorization", "Bearer " + *api_key_);
  const auto res = client.Post(options_.path, headers, chat_request_body(request), "application/json");
  if (!res) {
    throw Error(Errc::ProviderError, options_.base_url + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(Errc::ProviderError,
                "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 300));
  }
  return parse_chat_response(res->body);
}

}  // namespace tokbias
