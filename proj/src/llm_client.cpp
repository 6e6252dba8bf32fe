#include "diplomacy/llm_client.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <httplib.h>

namespace diplomacy {

namespace {

using nlohmann::json;

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

TokenUsage estimated_usage(const std::vector<ChatTurn>& conversation,
                           const std::string& reply) {
  TokenUsage u;
  for (const auto& turn : conversation)
    u.prompt_tokens += estimate_tokens(turn.content);
  u.completion_tokens = estimate_tokens(reply);
  u.estimated = true;
  return u;
}

const std::string& last_user_content(const std::vector<ChatTurn>& conversation) {
  for (auto it = conversation.rbegin(); it != conversation.rend(); ++it)
    if (it->role == "user") return it->content;
  static const std::string empty;
  return empty;
}

}  // namespace

std::int64_t estimate_tokens(const std::string& text) {
  return static_cast<std::int64_t>((text.size() + 3) / 4);
}

// ---------------------------------------------------------------------------
// extract_json_payload

namespace {

// All complete, kind-matched bracket regions in text[from..), string-aware.
std::vector<std::pair<std::size_t, std::size_t>> balanced_regions(
    const std::string& text, std::size_t from, bool& saw_opener) {
  std::vector<std::pair<std::size_t, std::size_t>> regions;
  std::vector<char> stack;
  std::size_t region_start = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = from; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (escaped)
        escaped = false;
      else if (c == '\\')
        escaped = true;
      else if (c == '"')
        in_string = false;
      continue;
    }
    if (!stack.empty() && c == '"') {
      in_string = true;
      continue;
    }
    if (c == '{' || c == '[') {
      saw_opener = true;
      if (stack.empty()) region_start = i;
      stack.push_back(c);
    } else if (c == '}' || c == ']') {
      if (stack.empty()) continue;  // stray close outside any region
      char open = stack.back();
      if ((c == '}') != (open == '{')) {
        stack.clear();  // mismatched close: discard the candidate
        continue;
      }
      stack.pop_back();
      if (stack.empty()) regions.emplace_back(region_start, i + 1);
    }
  }
  return regions;
}

json parse_last_region(const std::string& text, std::size_t from, bool& found,
                       bool& saw_opener) {
  auto regions = balanced_regions(text, from, saw_opener);
  for (auto it = regions.rbegin(); it != regions.rend(); ++it) {
    json parsed = json::parse(text.substr(it->first, it->second - it->first),
                              nullptr, false);
    if (!parsed.is_discarded()) {
      found = true;
      return parsed;
    }
  }
  if (!regions.empty()) saw_opener = true;
  found = false;
  return json();
}

}  // namespace

json extract_json_payload(const std::string& text) {
  static const std::string kMarker = "PARSABLE OUTPUT";
  bool found = false;
  bool saw_opener = false;
  std::size_t marker = text.rfind(kMarker);
  if (marker != std::string::npos) {
    json value =
        parse_last_region(text, marker + kMarker.size(), found, saw_opener);
    if (found) return value;
  }
  json value = parse_last_region(text, 0, found, saw_opener);
  if (found) return value;
  if (saw_opener)
    throw DipError(ErrorCode::UnbalancedJson,
                   "brackets present but no parsable JSON region");
  throw DipError(ErrorCode::NoJsonFound, "no JSON object or array in response");
}

// ---------------------------------------------------------------------------
// HttpModelClient

HttpModelClient::HttpModelClient(ModelEndpoint endpoint)
    : endpoint_(std::move(endpoint)), jitter_rng_(std::random_device{}()) {
  if (endpoint_.timeout_seconds <= 0 || endpoint_.temperature < 0)
    throw DipError(ErrorCode::ConfigError, "invalid endpoint parameters");
}

double HttpModelClient::jittered_backoff(int attempt) {
  double base = endpoint_.backoff_base_seconds * std::pow(2.0, attempt);
  std::uniform_real_distribution<double> jitter(0.8, 1.2);
  std::lock_guard<std::mutex> lock(mu_);
  return base * jitter(jitter_rng_);
}

Completion HttpModelClient::complete(const std::vector<ChatTurn>& conversation) {
  const char* credential = nullptr;
  if (!endpoint_.credential_env.empty()) {
    credential = std::getenv(endpoint_.credential_env.c_str());
    if (credential == nullptr || *credential == '\0')
      throw DipError(ErrorCode::AuthError,
                     "credential environment variable not set: " +
                         endpoint_.credential_env);
  }

  json body;
  body["model"] = endpoint_.model_id;
  body["temperature"] = endpoint_.temperature;
  body["max_tokens"] = endpoint_.max_output_tokens;
  body["messages"] = json::array();
  for (const auto& turn : conversation)
    body["messages"].push_back({{"role", turn.role}, {"content", turn.content}});
  const std::string payload = body.dump();

  // Concurrency cap: block until an in-flight slot frees up.
  if (endpoint_.max_concurrency > 0) {
    std::unique_lock<std::mutex> lock(mu_);
    slot_free_.wait(lock,
                    [&] { return in_flight_ < endpoint_.max_concurrency; });
    ++in_flight_;
  }
  struct SlotRelease {
    HttpModelClient* self;
    ~SlotRelease() {
      if (self->endpoint_.max_concurrency > 0) {
        std::lock_guard<std::mutex> lock(self->mu_);
        --self->in_flight_;
        self->slot_free_.notify_one();
      }
    }
  } release{this};

  const std::int64_t started = now_ms();
  ErrorCode last_error = ErrorCode::ProtocolError;
  std::string last_detail = "no attempt made";

  for (int attempt = 0; attempt <= endpoint_.max_retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::duration<double>(
          jittered_backoff(attempt - 1)));

    httplib::Client cli(endpoint_.base_url);
    auto seconds = static_cast<time_t>(endpoint_.timeout_seconds);
    auto micros = static_cast<time_t>(
        (endpoint_.timeout_seconds - static_cast<double>(seconds)) * 1e6);
    cli.set_connection_timeout(seconds, micros);
    cli.set_read_timeout(seconds, micros);
    cli.set_write_timeout(seconds, micros);

    httplib::Headers headers;
    if (credential != nullptr)
      headers.emplace("Authorization", std::string("Bearer ") + credential);

    auto res = cli.Post(endpoint_.path, headers, payload, "application/json");
    if (!res) {
      bool timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                       res.error() == httplib::Error::Read ||
                       res.error() == httplib::Error::Write;
      last_error = timed_out ? ErrorCode::TimedOut : ErrorCode::ProtocolError;
      last_detail = "transport failure: " + httplib::to_string(res.error());
      continue;  // transient: retry
    }
    if (res->status == 401 || res->status == 403)
      throw DipError(ErrorCode::AuthError,
                     "authentication rejected (HTTP " +
                         std::to_string(res->status) + ")");
    if (res->status == 429) {
      last_error = ErrorCode::RateLimited;
      last_detail = "rate limited (HTTP 429)";
      continue;
    }
    if (res->status >= 500) {
      last_error = ErrorCode::ProtocolError;
      last_detail = "server error (HTTP " + std::to_string(res->status) + ")";
      continue;
    }
    if (res->status != 200)
      throw DipError(ErrorCode::ProtocolError,
                     "unexpected HTTP status " + std::to_string(res->status));

    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") ||
        !reply["choices"].is_array() || reply["choices"].empty())
      throw DipError(ErrorCode::ProtocolError,
                     "malformed chat-completion response body");

    Completion out;
    out.text = reply["choices"][0].value("message", json::object())
                   .value("content", "");
    out.latency_ms = now_ms() - started;
    out.retry_count = attempt;
    if (reply.contains("usage") && reply["usage"].is_object()) {
      out.usage.prompt_tokens = reply["usage"].value("prompt_tokens", 0);
      out.usage.completion_tokens =
          reply["usage"].value("completion_tokens", 0);
      if (out.usage.prompt_tokens < 0 || out.usage.completion_tokens < 0)
        throw DipError(ErrorCode::ProtocolError, "negative token usage");
    } else {
      out.usage = estimated_usage(conversation, out.text);
    }
    return out;
  }
  throw DipError(last_error, last_detail + " after " +
                                 std::to_string(endpoint_.max_retries) +
                                 " retries");
}

// ---------------------------------------------------------------------------
// Scripted doubles

TranscriptClient::TranscriptClient(std::vector<std::string> replies)
    : replies_(std::move(replies)) {}

Completion TranscriptClient::complete(
    const std::vector<ChatTurn>& conversation) {
  std::lock_guard<std::mutex> lock(mu_);
  if (next_ >= replies_.size())
    throw DipError(ErrorCode::ProtocolError,
                   "transcript exhausted after " +
                       std::to_string(replies_.size()) + " replies");
  Completion out;
  out.text = replies_[next_++];
  out.usage = estimated_usage(conversation, out.text);
  return out;
}

int TranscriptClient::calls() const {
  std::lock_guard<std::mutex> lock(mu_);
  return static_cast<int>(next_);
}

Completion CallbackClient::complete(const std::vector<ChatTurn>& conversation) {
  Completion out;
  out.text = fn_(conversation);
  out.usage = estimated_usage(conversation, out.text);
  return out;
}

std::vector<std::vector<std::string>> parse_possible_order_groups(
    const std::string& prompt) {
  std::vector<std::vector<std::string>> groups;
  std::istringstream in(prompt);
  std::string line;
  bool inside = false;
  while (std::getline(in, line)) {
    if (line.rfind("Possible Orders For", 0) == 0) {
      inside = true;
      continue;
    }
    if (!inside) continue;
    if (line == "End Possible Orders") break;
    if (line.rfind("  ", 0) == 0) {
      if (!groups.empty()) groups.back().push_back(line.substr(2));
    } else if (!line.empty() && line.back() == ':') {
      groups.emplace_back();
    }
  }
  return groups;
}

Completion ScriptedPlayerBot::complete(
    const std::vector<ChatTurn>& conversation) {
  const std::string& prompt = last_user_content(conversation);
  std::string reply;
  if (prompt.rfind("NEGOTIATION SUMMARY REQUEST", 0) == 0) {
    nlohmann::json diary = {{"negotiation_summary", "No notable negotiations."},
                            {"intent", "Proceed with planned orders."},
                            {"updated_relationships", nlohmann::json::object()},
                            {"goals", nlohmann::json::array()}};
    reply = diary.dump(2);
  } else if (prompt.find("NEGOTIATION MESSAGES") != std::string::npos) {
    reply = "[]";
  } else {
    nlohmann::json orders = nlohmann::json::array();
    for (const auto& group : parse_possible_order_groups(prompt))
      if (!group.empty()) orders.push_back(pick_order(group));
    reply = "Reasoning:\nScripted policy.\nPARSABLE OUTPUT:\n" +
            nlohmann::json{{"orders", orders}}.dump(2);
  }
  Completion out;
  out.text = std::move(reply);
  out.usage = estimated_usage(conversation, out.text);
  return out;
}

std::string RandomOrderBot::pick_order(const std::vector<std::string>& options) {
  std::lock_guard<std::mutex> lock(mu_);
  std::uniform_int_distribution<std::size_t> dist(0, options.size() - 1);
  return options[dist(rng_)];
}

std::string AlwaysHoldBot::pick_order(const std::vector<std::string>& options) {
  for (const auto& o : options)
    if (o.size() > 2 && o.compare(o.size() - 2, 2, " H") == 0) return o;
  return options.front();
}

}  // namespace diplomacy
