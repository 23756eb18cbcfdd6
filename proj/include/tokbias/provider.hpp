#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace tokbias {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
};

/// A chat-completion backend. Implementations must be callable from several
/// threads at once.
class Provider {
 public:
  virtual ~Provider() = default;

  /// Returns the assistant text. Throws Error(ProviderError).
  virtual std::string complete(const ChatRequest& request) = 0;
};

struct MockRule {
  /// Empty matches any model.
  std::string model;
  /// Empty matches any prompt.
  std::string prompt_contains;
  std::string response;
};

/// Deterministic provider for tests and dry runs. The first matching rule
/// answers; otherwise the reply is derived from a hash of
/// (seed, model, temperature, prompt).
class MockProvider : public Provider {
 public:
  explicit MockProvider(std::uint64_t seed = 0) : seed_(seed) {}

  void add_rule(MockRule rule);
  /// The first `n` calls throw ProviderError.
  void fail_first(std::size_t n) { fail_remaining_ = n; }
  void fail_always() { fail_remaining_ = static_cast<std::size_t>(-1); }
  void set_latency(std::chrono::milliseconds latency) { latency_ = latency; }

  std::string complete(const ChatRequest& request) override;

  std::size_t calls() const noexcept { return calls_.load(); }
  std::size_t max_in_flight() const noexcept { return max_in_flight_.load(); }
  std::vector<ChatRequest> requests() const;

 private:
  std::uint64_t seed_;
  std::vector<MockRule> rules_;
  std::atomic<std::size_t> fail_remaining_{0};
  std::chrono::milliseconds latency_{0};
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> max_in_flight_{0};
  mutable std::mutex log_mutex_;
  std::vector<ChatRequest> log_;
};

struct HttpProviderOptions {
  /// Scheme, host and optional port, e.g. "https://api.openai.com".
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  /// Environment variable holding the bearer token; unset means no
  /// Authorization header.
  std::string api_key_env = "OPENAI_API_KEY";
  int timeout_seconds = 60;
};

/// OpenAI-compatible chat-completion client over HTTP(S).
class OpenAICompatibleProvider : public Provider {
 public:
  explicit OpenAICompatibleProvider(HttpProviderOptions options);

  std::string complete(const ChatRequest& request) override;

 private:
  HttpProviderOptions options_;
  std::optional<std::string> api_key_;
};

/// JSON request body for `request`.
std::string chat_request_body(const ChatRequest& request);
/// choices[0].message.content of a response body. Throws ProviderError.
std::string parse_chat_response(std::string_view body);

}  // namespace tokbias
