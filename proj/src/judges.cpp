#include "diplomacy/judges.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "diplomacy/metrics.hpp"
#include "diplomacy/state_repr.hpp"

namespace diplomacy {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Null-tolerant field reads: json::value throws when the key holds null.
std::string str_or(const json& j, const char* key, const std::string& def) {
  if (!j.contains(key) || !j[key].is_string()) return def;
  return j[key].get<std::string>();
}

double num_or(const json& j, const char* key, double def) {
  if (!j.contains(key) || !j[key].is_number()) return def;
  return j[key].get<double>();
}

std::string format_judge_message(const Message& m, int index) {
  std::string to = m.recipient ? power_id(*m.recipient) : std::string("ALL");
  return std::to_string(index + 1) + ". [" + m.phase + " round " +
         std::to_string(m.round) + "] " + power_id(m.sender) + " -> " + to +
         ": " + m.content;
}

void warn(std::vector<std::string>* warnings, std::string text) {
  if (warnings) warnings->push_back(std::move(text));
}

}  // namespace

const char* promise_type_name(PromiseType t) {
  switch (t) {
    case PromiseType::DEFENSIVE: return "defensive";
    case PromiseType::OFFENSIVE: return "offensive";
    case PromiseType::NEUTRALITY: return "neutrality";
    case PromiseType::SUPPORT: return "support";
  }
  return "?";
}

const char* specificity_name(PromiseSpecificity s) {
  switch (s) {
    case PromiseSpecificity::CONDITIONAL: return "conditional";
    case PromiseSpecificity::SPECIFIC: return "specific";
    case PromiseSpecificity::GENERAL: return "general";
  }
  return "?";
}

const char* betrayal_context_name(BetrayalContext c) {
  switch (c) {
    case BetrayalContext::UNDER_PRESSURE: return "under_pressure";
    case BetrayalContext::OPPORTUNISTIC: return "opportunistic";
    case BetrayalContext::STRATEGIC: return "strategic";
    case BetrayalContext::CHAOTIC: return "chaotic";
  }
  return "?";
}

std::optional<PromiseType> promise_type_from_string(const std::string& s) {
  std::string v = lower(s);
  if (v == "defensive" || v == "defense") return PromiseType::DEFENSIVE;
  if (v == "offensive" || v == "offense") return PromiseType::OFFENSIVE;
  if (v == "neutrality") return PromiseType::NEUTRALITY;
  if (v == "support") return PromiseType::SUPPORT;
  return std::nullopt;
}

std::optional<PromiseSpecificity> specificity_from_string(const std::string& s) {
  std::string v = lower(s);
  if (v == "conditional") return PromiseSpecificity::CONDITIONAL;
  if (v == "specific") return PromiseSpecificity::SPECIFIC;
  if (v == "general") return PromiseSpecificity::GENERAL;
  return std::nullopt;
}

std::optional<BetrayalContext> betrayal_context_from_string(const std::string& s) {
  std::string v = lower(s);
  if (v == "under_pressure") return BetrayalContext::UNDER_PRESSURE;
  if (v == "opportunistic") return BetrayalContext::OPPORTUNISTIC;
  if (v == "strategic") return BetrayalContext::STRATEGIC;
  if (v == "chaotic") return BetrayalContext::CHAOTIC;
  return std::nullopt;
}

void to_json(json& j, const PromiseRecord& r) {
  j = json{{"game_id", r.game_id},
           {"phase", r.phase},
           {"message_index", r.message_index},
           {"has_promise", r.has_promise},
           {"promise_type",
            r.promise_type ? json(promise_type_name(*r.promise_type)) : json()},
           {"specificity",
            r.specificity ? json(specificity_name(*r.specificity)) : json()},
           {"confidence", r.confidence},
           {"explanation", r.explanation},
           {"promise_text", r.promise_text}};
}

void from_json(const json& j, PromiseRecord& r) {
  r.game_id = str_or(j, "game_id", "");
  r.phase = str_or(j, "phase", "");
  r.message_index = static_cast<int>(num_or(j, "message_index", 0));
  r.has_promise = j.contains("has_promise") && j["has_promise"].is_boolean() &&
                  j["has_promise"].get<bool>();
  r.promise_type = promise_type_from_string(str_or(j, "promise_type", ""));
  r.specificity = specificity_from_string(str_or(j, "specificity", ""));
  r.confidence = num_or(j, "confidence", 0.0);
  r.explanation = str_or(j, "explanation", "");
  r.promise_text = str_or(j, "promise_text", "");
}

void to_json(json& j, const FulfillmentRecord& r) {
  j = json{{"game_id", r.game_id},
           {"phase", r.phase},
           {"promise_index", r.promise_index},
           {"kept", r.kept},
           {"betrayal_context", r.betrayal_context
                                    ? json(betrayal_context_name(*r.betrayal_context))
                                    : json()},
           {"confidence", r.confidence},
           {"explanation", r.explanation}};
}

void from_json(const json& j, FulfillmentRecord& r) {
  r.game_id = str_or(j, "game_id", "");
  r.phase = str_or(j, "phase", "");
  r.promise_index = static_cast<int>(num_or(j, "promise_index", 0));
  r.kept = !j.contains("kept") || !j["kept"].is_boolean() || j["kept"].get<bool>();
  r.betrayal_context =
      betrayal_context_from_string(str_or(j, "betrayal_context", ""));
  r.confidence = num_or(j, "confidence", 0.0);
  r.explanation = str_or(j, "explanation", "");
}

ModelEndpoint judge_endpoint(std::string base_url, std::string model_id,
                             double temperature) {
  ModelEndpoint ep;
  ep.base_url = std::move(base_url);
  ep.model_id = std::move(model_id);
  ep.temperature = temperature;
  return ep;
}

std::string render_promise_made_prompt(const std::vector<Message>& messages) {
  std::string rendered;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (i) rendered += "\n";
    rendered += format_judge_message(messages[i], static_cast<int>(i));
  }
  return substitute(template_text("promise_made_prompt"),
                    {{"phase_messages", rendered}});
}

std::string render_promise_kept_prompt(const std::vector<PromiseRecord>& promises,
                                       const std::string& actions) {
  std::string rendered;
  for (std::size_t i = 0; i < promises.size(); ++i) {
    const PromiseRecord& p = promises[i];
    if (i) rendered += "\n";
    rendered += std::to_string(i + 1) + ". [" +
                (p.promise_type ? promise_type_name(*p.promise_type) : "unknown") +
                ", " +
                (p.specificity ? specificity_name(*p.specificity) : "unknown") +
                "] " + p.promise_text;
  }
  return substitute(template_text("promise_kept_prompt"),
                    {{"promises", rendered}, {"actions", actions}});
}

namespace {

// One judge call with a single retry covering transport and malformed output.
// `parse` must throw JudgeOutputMalformed for anything retryable; other
// DipErrors (e.g. LengthMismatch) propagate immediately.
template <typename T>
T call_judge(ModelClient& judge, const std::string& prompt,
             const std::function<T(const json&)>& parse) {
  std::vector<ChatTurn> convo{{"user", prompt}};
  for (int attempt = 0;; ++attempt) {
    try {
      Completion reply = judge.complete(convo);
      json payload;
      try {
        payload = extract_json_payload(reply.text);
      } catch (const DipError&) {
        throw DipError(ErrorCode::JudgeOutputMalformed,
                       "judge reply contains no parsable JSON");
      }
      return parse(payload);
    } catch (const DipError& e) {
      bool retryable = e.code() == ErrorCode::JudgeOutputMalformed ||
                       e.code() == ErrorCode::TimedOut ||
                       e.code() == ErrorCode::RateLimited ||
                       e.code() == ErrorCode::ProtocolError;
      if (!retryable || attempt >= 1) throw;
    }
  }
}

}  // namespace

std::vector<PromiseRecord> detect_promises(ModelClient& judge,
                                           const std::vector<Message>& messages,
                                           const std::string& game_id,
                                           const std::string& phase,
                                           std::vector<std::string>* warnings) {
  if (messages.empty()) return {};
  std::string prompt = render_promise_made_prompt(messages);
  return call_judge<std::vector<PromiseRecord>>(
      judge, prompt, [&](const json& payload) {
        if (!payload.is_array())
          throw DipError(ErrorCode::JudgeOutputMalformed,
                         "promise judgment is not a JSON list");
        if (payload.size() != messages.size())
          throw DipError(ErrorCode::LengthMismatch,
                         std::to_string(payload.size()) + " judgments for " +
                             std::to_string(messages.size()) + " messages");
        std::vector<PromiseRecord> out;
        for (std::size_t i = 0; i < payload.size(); ++i) {
          const json& entry = payload[i];
          if (!entry.is_object() || !entry.contains("has_promise") ||
              !entry["has_promise"].is_boolean())
            throw DipError(ErrorCode::JudgeOutputMalformed,
                           "judgment entry missing has_promise");
          PromiseRecord rec;
          rec.game_id = game_id;
          rec.phase = phase;
          rec.message_index = static_cast<int>(i);
          rec.has_promise = entry["has_promise"].get<bool>();
          if (rec.has_promise) {
            rec.promise_type =
                promise_type_from_string(str_or(entry, "promise_type", ""));
            rec.specificity =
                specificity_from_string(str_or(entry, "specificity", ""));
            if (!rec.promise_type || !rec.specificity)
              throw DipError(ErrorCode::JudgeOutputMalformed,
                             "promise without a recognizable type/specificity");
          }
          rec.confidence = num_or(entry, "confidence", 0.0);
          if (rec.confidence < 0.0 || rec.confidence > 1.0) {
            warn(warnings, "confidence outside [0,1] clamped for message " +
                               std::to_string(i + 1));
            rec.confidence = std::clamp(rec.confidence, 0.0, 1.0);
          }
          rec.explanation = str_or(entry, "explanation", "");
          rec.promise_text = str_or(entry, "promise_text", "");
          out.push_back(std::move(rec));
        }
        return out;
      });
}

std::optional<PromiseRecord> select_primary_promise(
    const std::vector<PromiseRecord>& records) {
  std::optional<PromiseRecord> best;
  for (const auto& r : records) {
    if (!r.has_promise) continue;
    if (!best || r.confidence > best->confidence) best = r;
  }
  return best;
}

std::vector<FulfillmentRecord> judge_fulfillment(
    ModelClient& judge, const std::vector<PromiseRecord>& promises,
    const std::string& actions, std::vector<std::string>* warnings) {
  if (promises.empty())
    throw DipError(ErrorCode::PreconditionViolated,
                   "judge_fulfillment requires at least one promise");
  std::string prompt = render_promise_kept_prompt(promises, actions);
  return call_judge<std::vector<FulfillmentRecord>>(
      judge, prompt, [&](const json& payload) {
        if (!payload.is_array())
          throw DipError(ErrorCode::JudgeOutputMalformed,
                         "fulfillment judgment is not a JSON list");
        if (payload.size() != promises.size())
          throw DipError(ErrorCode::LengthMismatch,
                         std::to_string(payload.size()) + " judgments for " +
                             std::to_string(promises.size()) + " promises");
        std::vector<FulfillmentRecord> out;
        for (std::size_t i = 0; i < payload.size(); ++i) {
          const json& entry = payload[i];
          if (!entry.is_object() || !entry.contains("kept") ||
              !entry["kept"].is_boolean())
            throw DipError(ErrorCode::JudgeOutputMalformed,
                           "judgment entry missing kept");
          FulfillmentRecord rec;
          rec.game_id = promises[i].game_id;
          rec.phase = promises[i].phase;
          rec.promise_index = static_cast<int>(i);
          rec.kept = entry["kept"].get<bool>();
          std::string context = str_or(entry, "betrayal_context", "");
          if (!rec.kept) {
            rec.betrayal_context = betrayal_context_from_string(context);
            if (!rec.betrayal_context && context != "null" && !context.empty())
              throw DipError(ErrorCode::JudgeOutputMalformed,
                             "unrecognized betrayal context '" + context + "'");
          } else if (betrayal_context_from_string(context)) {
            warn(warnings, "betrayal_context on a kept promise normalized to "
                           "null (promise " + std::to_string(i + 1) + ")");
          }
          rec.confidence = std::clamp(num_or(entry, "confidence", 0.0), 0.0, 1.0);
          rec.explanation = str_or(entry, "explanation", "");
          out.push_back(std::move(rec));
        }
        return out;
      });
}

BetrayalStats betrayal_rates(const std::vector<FulfillmentRecord>& fulfillments,
                             const std::vector<PromiseRecord>& promises) {
  BetrayalStats stats;
  stats.promise_count = static_cast<int>(fulfillments.size());
  if (fulfillments.empty()) return stats;

  int broken_total = 0;
  std::map<PromiseType, int> total_by_type, broken_by_type;
  std::map<std::string, std::pair<int, int>> per_game;  // broken, total
  for (const auto& f : fulfillments) {
    if (f.promise_index < 0 ||
        f.promise_index >= static_cast<int>(promises.size()))
      throw DipError(ErrorCode::PreconditionViolated,
                     "fulfillment references promise " +
                         std::to_string(f.promise_index) + " of " +
                         std::to_string(promises.size()));
    const PromiseRecord& p = promises[f.promise_index];
    if (!p.promise_type)
      throw DipError(ErrorCode::PreconditionViolated,
                     "judged promise lacks a type");
    bool broken = !f.kept;
    broken_total += broken;
    total_by_type[*p.promise_type] += 1;
    broken_by_type[*p.promise_type] += broken;
    if (!p.game_id.empty()) {
      auto& [b, t] = per_game[p.game_id];
      b += broken;
      t += 1;
    }
  }
  stats.overall_broken =
      static_cast<double>(broken_total) / static_cast<double>(fulfillments.size());
  for (const auto& [type, total] : total_by_type) {
    stats.broken_by_type[type] =
        static_cast<double>(broken_by_type[type]) / static_cast<double>(total);
    stats.type_distribution[type] =
        static_cast<double>(total) / static_cast<double>(fulfillments.size());
  }
  for (const auto& [game, counts] : per_game)
    stats.per_game[game] =
        static_cast<double>(counts.first) / static_cast<double>(counts.second);
  return stats;
}

KappaResult cohens_kappa(const std::vector<std::string>& labels_a,
                         const std::vector<std::string>& labels_b) {
  if (labels_a.empty() || labels_a.size() != labels_b.size())
    throw DipError(ErrorCode::LengthMismatch,
                   "kappa needs two equal-length non-empty label lists");
  const double n = static_cast<double>(labels_a.size());
  std::map<std::string, int> freq_a, freq_b;
  int matches = 0;
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    freq_a[labels_a[i]] += 1;
    freq_b[labels_b[i]] += 1;
    matches += labels_a[i] == labels_b[i];
  }
  double p_o = matches / n;
  double p_e = 0.0;
  for (const auto& [label, count] : freq_a) {
    auto it = freq_b.find(label);
    if (it != freq_b.end()) p_e += (count / n) * (it->second / n);
  }
  if (p_e >= 1.0)
    throw DipError(ErrorCode::DegenerateMarginals,
                   "chance agreement is 1: kappa undefined");
  return {(p_o - p_e) / (1.0 - p_e), p_o};
}

ReliabilityResult judge_agreement(const std::vector<PromiseRecord>& a,
                                  const std::vector<PromiseRecord>& b) {
  if (a.size() != b.size())
    throw DipError(ErrorCode::LengthMismatch,
                   "annotator passes cover different message counts");
  std::vector<std::string> labels_a, labels_b;
  std::vector<double> conf_a, conf_b;
  for (std::size_t i = 0; i < a.size(); ++i) {
    labels_a.push_back(a[i].has_promise ? promise_type_name(*a[i].promise_type)
                                        : "none");
    labels_b.push_back(b[i].has_promise ? promise_type_name(*b[i].promise_type)
                                        : "none");
    conf_a.push_back(a[i].confidence);
    conf_b.push_back(b[i].confidence);
  }
  ReliabilityResult result;
  result.kappa = cohens_kappa(labels_a, labels_b);
  try {
    result.confidence_r = pearson_r(conf_a, conf_b);
  } catch (const DipError&) {
    result.confidence_r = std::nullopt;
  }
  return result;
}

std::vector<PhaseJudgment> judge_match(
    const std::string& jsonl, Power tracked,
    const std::function<std::shared_ptr<ModelClient>()>& client_factory,
    const std::string& game_id, std::vector<std::string>* warnings) {
  struct PhaseInput {
    std::string phase;
    std::vector<Message> messages;
    std::string actions;
  };
  std::vector<PhaseInput> inputs;
  std::istringstream in(jsonl);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded())
      throw DipError(ErrorCode::LogInconsistent, "unparsable log line");
    std::string type = str_or(rec, "type", "");
    if (type == "config") continue;
    if (type == "summary") break;
    std::string phase = str_or(rec, "phase", "");
    if (phase.empty() || phase.back() != 'M') continue;
    PhaseInput input;
    input.phase = phase;
    if (rec.contains("messages"))
      for (const auto& mj : rec["messages"]) {
        Message m;
        from_json(mj, m);
        if (m.sender == tracked) input.messages.push_back(std::move(m));
      }
    if (rec.contains("outcomes"))
      for (const auto& oj : rec["outcomes"]) {
        if (power_from_string(str_or(oj, "power", "")) != tracked) continue;
        input.actions += str_or(oj, "order", "") + " -> " +
                         str_or(oj, "outcome", "") + "\n";
      }
    if (!input.messages.empty()) inputs.push_back(std::move(input));
  }

  std::vector<std::future<PhaseJudgment>> futures;
  std::vector<std::vector<std::string>> phase_warnings(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    futures.push_back(std::async(std::launch::async, [&, i]() {
      const PhaseInput& input = inputs[i];
      auto client = client_factory();
      PhaseJudgment result;
      result.phase = input.phase;
      result.promises = detect_promises(*client, input.messages, game_id,
                                        input.phase, &phase_warnings[i]);
      result.primary = select_primary_promise(result.promises);
      if (result.primary)
        result.fulfillments = judge_fulfillment(
            *client, {*result.primary}, input.actions, &phase_warnings[i]);
      return result;
    }));
  }
  std::vector<PhaseJudgment> judgments;
  for (auto& f : futures) judgments.push_back(f.get());
  if (warnings)
    for (auto& ws : phase_warnings)
      for (auto& w : ws) warnings->push_back(std::move(w));
  return judgments;
}

std::string judgments_to_jsonl(const std::vector<PhaseJudgment>& judgments) {
  std::string out;
  for (const auto& pj : judgments) {
    for (const auto& promise : pj.promises) {
      json line;
      to_json(line, promise);
      line["primary"] = pj.primary &&
                        pj.primary->message_index == promise.message_index;
      line["conditional_flag"] =
          promise.specificity == PromiseSpecificity::CONDITIONAL;
      if (line["primary"].get<bool>() && !pj.fulfillments.empty()) {
        json fj;
        to_json(fj, pj.fulfillments.front());
        line["fulfillment"] = fj;
      }
      out += line.dump() + "\n";
    }
  }
  return out;
}

}  // namespace diplomacy
