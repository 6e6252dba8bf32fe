#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diplomacy/core.hpp"

namespace diplomacy {

// A chat-completion endpoint. Credentials are never stored here: only the
// *name* of the environment variable that holds the token.
struct ModelEndpoint {
  std::string base_url;        // "http://host:port" (path defaults below)
  std::string path = "/v1/chat/completions";
  std::string model_id;
  double temperature = 1.0;
  int max_output_tokens = 2048;
  std::string credential_env;  // empty: unauthenticated endpoint
  double timeout_seconds = 30.0;
  int max_retries = 3;
  double backoff_base_seconds = 2.0;  // doubles per retry, ±20% jitter
  int max_concurrency = 0;            // 0: unlimited in-flight requests
};

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  bool estimated = false;  // true when counts come from the char/4 heuristic

  std::int64_t total() const { return prompt_tokens + completion_tokens; }
  TokenUsage& operator+=(const TokenUsage& o) {
    prompt_tokens += o.prompt_tokens;
    completion_tokens += o.completion_tokens;
    estimated = estimated || o.estimated;
    return *this;
  }
};

struct ChatTurn {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct Completion {
  std::string text;
  TokenUsage usage;
  std::int64_t latency_ms = 0;
  int retry_count = 0;
};

// ceil(bytes / 4): the fallback estimator used when a provider omits usage.
std::int64_t estimate_tokens(const std::string& text);

// Returns the last bracket-balanced JSON object or array in `text`,
// preferring content after a "PARSABLE OUTPUT" marker when one is present.
// Fenced code blocks are transparent to the scan.
// Throws NoJsonFound / UnbalancedJson.
nlohmann::json extract_json_payload(const std::string& text);

class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual Completion complete(const std::vector<ChatTurn>& conversation) = 0;
};

// HTTP client speaking the de-facto chat-completion convention:
// POST {model, messages, temperature, max_tokens} -> first choice content.
// Retries 429 and transient failures with exponential backoff.
class HttpModelClient : public ModelClient {
 public:
  explicit HttpModelClient(ModelEndpoint endpoint);
  Completion complete(const std::vector<ChatTurn>& conversation) override;
  const ModelEndpoint& endpoint() const { return endpoint_; }

 private:
  double jittered_backoff(int attempt);

  ModelEndpoint endpoint_;
  std::mutex mu_;
  std::condition_variable slot_free_;
  int in_flight_ = 0;
  std::mt19937_64 jitter_rng_;
};

// Replays a fixed list of responses in order; throws ProtocolError once the
// transcript is exhausted. Fully deterministic.
class TranscriptClient : public ModelClient {
 public:
  explicit TranscriptClient(std::vector<std::string> replies);
  Completion complete(const std::vector<ChatTurn>& conversation) override;
  int calls() const;

 private:
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
  mutable std::mutex mu_;
};

// Answers every call by invoking a function of the conversation.
class CallbackClient : public ModelClient {
 public:
  using Fn = std::function<std::string(const std::vector<ChatTurn>&)>;
  explicit CallbackClient(Fn fn) : fn_(std::move(fn)) {}
  Completion complete(const std::vector<ChatTurn>& conversation) override;

 private:
  Fn fn_;
};

// Shared logic for the offline player bots: recognizes order, negotiation
// and diary prompts by their markers and emits well-formed replies.
class ScriptedPlayerBot : public ModelClient {
 public:
  Completion complete(const std::vector<ChatTurn>& conversation) override;

 protected:
  // One entry per unit: the unit's legal order strings from the prompt.
  virtual std::string pick_order(const std::vector<std::string>& options) = 0;
};

// Picks a uniformly random legal order for every unit. Deterministic for a
// given seed and call sequence.
class RandomOrderBot : public ScriptedPlayerBot {
 public:
  explicit RandomOrderBot(std::uint64_t seed) : rng_(seed) {}

 protected:
  std::string pick_order(const std::vector<std::string>& options) override;

 private:
  std::mt19937_64 rng_;
  std::mutex mu_;
};

// Holds with every unit (falls back to the first listed option in phases
// where holding is not available, e.g. retreats and adjustments).
class AlwaysHoldBot : public ScriptedPlayerBot {
 protected:
  std::string pick_order(const std::vector<std::string>& options) override;
};

// Exposed for the bots and for tests: the per-unit order lists between
// "Possible Orders For" and "End Possible Orders" in an order prompt.
std::vector<std::vector<std::string>> parse_possible_order_groups(
    const std::string& prompt);

}  // namespace diplomacy
