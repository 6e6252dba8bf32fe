#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diplomacy/agent_state.hpp"
#include "diplomacy/llm_client.hpp"

namespace diplomacy {

enum class PromiseType { DEFENSIVE, OFFENSIVE, NEUTRALITY, SUPPORT };
enum class PromiseSpecificity { CONDITIONAL, SPECIFIC, GENERAL };
enum class BetrayalContext { UNDER_PRESSURE, OPPORTUNISTIC, STRATEGIC, CHAOTIC };

const char* promise_type_name(PromiseType t);              // "defensive" ...
const char* specificity_name(PromiseSpecificity s);        // "conditional" ...
const char* betrayal_context_name(BetrayalContext c);      // "under_pressure" ...
std::optional<PromiseType> promise_type_from_string(const std::string& s);
std::optional<PromiseSpecificity> specificity_from_string(const std::string& s);
std::optional<BetrayalContext> betrayal_context_from_string(const std::string& s);

// One judged negotiation message. `message_index` is the position of the
// message in the judged batch; with `game_id` and `phase` it forms the
// persistence key.
struct PromiseRecord {
  std::string game_id;
  std::string phase;
  int message_index = 0;
  bool has_promise = false;
  std::optional<PromiseType> promise_type;        // present iff has_promise
  std::optional<PromiseSpecificity> specificity;  // present iff has_promise
  double confidence = 0.0;
  std::string explanation;
  std::string promise_text;
};

// The second judge's verdict on one promise. `promise_index` refers back to
// the promise list passed to judge_fulfillment.
struct FulfillmentRecord {
  std::string game_id;
  std::string phase;
  int promise_index = 0;
  bool kept = true;
  std::optional<BetrayalContext> betrayal_context;  // only when kept = false
  double confidence = 0.0;
  std::string explanation;
};

void to_json(nlohmann::json& j, const PromiseRecord& r);
void from_json(const nlohmann::json& j, PromiseRecord& r);
void to_json(nlohmann::json& j, const FulfillmentRecord& r);
void from_json(const nlohmann::json& j, FulfillmentRecord& r);

// A chat-completion endpoint preconfigured with the judge temperature.
ModelEndpoint judge_endpoint(std::string base_url, std::string model_id,
                             double temperature = 0.1);

// The appendix prompts with their placeholders substituted. Messages are
// numbered so the judge's list output aligns positionally.
std::string render_promise_made_prompt(const std::vector<Message>& messages);
std::string render_promise_kept_prompt(const std::vector<PromiseRecord>& promises,
                                       const std::string& actions);

// Asks the judge to classify every message; one retry on malformed output.
// Empty input returns an empty list without a call.
// Throws JudgeOutputMalformed (after the retry) or LengthMismatch.
std::vector<PromiseRecord> detect_promises(
    ModelClient& judge, const std::vector<Message>& messages,
    const std::string& game_id = "", const std::string& phase = "",
    std::vector<std::string>* warnings = nullptr);

// The has_promise record with maximal confidence; ties go to the earliest
// message. Absent when no message carries a promise.
std::optional<PromiseRecord> select_primary_promise(
    const std::vector<PromiseRecord>& records);

// Asks the judge whether each promise was honored by the sender's actions
// (rendered orders + outcomes for the same phase). kept = true entries with a
// non-null betrayal context are normalized to null with a warning.
// Throws PreconditionViolated on empty promises.
std::vector<FulfillmentRecord> judge_fulfillment(
    ModelClient& judge, const std::vector<PromiseRecord>& promises,
    const std::string& actions, std::vector<std::string>* warnings = nullptr);

struct BetrayalStats {
  int promise_count = 0;
  std::optional<double> overall_broken;  // absent when promise_count = 0
  // Only types that actually occur appear in the maps.
  std::map<PromiseType, double> broken_by_type;
  std::map<PromiseType, double> type_distribution;  // sums to 1
  std::map<std::string, double> per_game;           // game_id -> broken rate
};

// Broken proportions overall / per promise type / per game. Never divides by
// zero: with no promises every statistic is reported absent or empty.
BetrayalStats betrayal_rates(const std::vector<FulfillmentRecord>& fulfillments,
                             const std::vector<PromiseRecord>& promises);

struct KappaResult {
  double kappa = 0.0;
  double raw_agreement = 0.0;
};

// Cohen's kappa over two annotators' categorical labels.
// Throws LengthMismatch on unequal or empty inputs, DegenerateMarginals when
// chance agreement is 1 (both annotators constant and identical).
KappaResult cohens_kappa(const std::vector<std::string>& labels_a,
                         const std::vector<std::string>& labels_b);

// Pairwise agreement between two promise-detection passes over the same
// messages: kappa/raw agreement over the promise-type labels ("none" when
// has_promise is false) plus the Pearson correlation of confidence scores
// (absent when degenerate).
struct ReliabilityResult {
  KappaResult kappa;
  std::optional<double> confidence_r;
};
ReliabilityResult judge_agreement(const std::vector<PromiseRecord>& a,
                                  const std::vector<PromiseRecord>& b);

// One movement phase's worth of pipeline output.
struct PhaseJudgment {
  std::string phase;
  std::vector<PromiseRecord> promises;
  std::optional<PromiseRecord> primary;
  std::vector<FulfillmentRecord> fulfillments;  // for the primary promise
};

// Full pipeline over a recorded match log: per movement phase, judge the
// tracked power's outgoing messages, pick the primary promise and assess it
// against that phase's adjudicated orders. Phases are judged concurrently;
// `client_factory` must hand out an independent client per call.
std::vector<PhaseJudgment> judge_match(
    const std::string& jsonl, Power tracked,
    const std::function<std::shared_ptr<ModelClient>()>& client_factory,
    const std::string& game_id = "", std::vector<std::string>* warnings = nullptr);

// One JSONL line per judged promise, keyed by (game id, phase, message
// index); conditional promises are flagged.
std::string judgments_to_jsonl(const std::vector<PhaseJudgment>& judgments);

}  // namespace diplomacy
