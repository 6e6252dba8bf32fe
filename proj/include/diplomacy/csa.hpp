#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "diplomacy/agent_state.hpp"
#include "diplomacy/match_runner.hpp"
#include "diplomacy/state_repr.hpp"

namespace diplomacy {

inline constexpr const char* kSnapshotVersion = "csa-1";

// A full game + agent snapshot at a phase boundary: everything needed to
// replay that single phase under an intervention.
struct Snapshot {
  std::string version = kSnapshotVersion;
  GameState state;
  std::vector<AgentState> agents;  // all seven, canonical power order
  PromptConfig prompt_config;
  std::string source_match;  // provenance: match id / log path
  std::string phase;         // phase id at capture

  const AgentState& agent(Power p) const;
};

void to_json(nlohmann::json& j, const Snapshot& s);
// Throws UnknownVersion for any version tag other than the current one.
void from_json(const nlohmann::json& j, Snapshot& s);

enum class PersuasionMethod { REASON, APOLOGY, LIE, EMPATHY, FAIRNESS, JAILBREAK };

const char* persuasion_method_name(PersuasionMethod m);  // "Reason", ...
// Accepts display names and bare tags, case-insensitively.
std::optional<PersuasionMethod> persuasion_method_from_string(const std::string& s);
// The "{method_instruction}" sentence injected into the mission text.
const std::string& persuasion_method_instruction(PersuasionMethod m);

struct Intervention {
  // (power, toward-power, level); pairs must be distinct.
  std::vector<std::tuple<Power, Power, RelationshipLevel>> relationship_overrides;
  // Extra mission text appended to the power's negotiation prompts.
  std::map<Power, std::string> prompt_injections;
  std::map<Power, std::string> model_substitutions;
  std::optional<PersuasionMethod> method;

  void validate() const;  // throws ConfigError on duplicate override pairs
};

// The snapshot with relationship overrides applied: the baseline all trial
// deltas are measured against.
Snapshot apply_intervention(const Snapshot& snapshot, const Intervention& iv);

struct TrialRecord {
  int index = 0;
  std::uint64_t seed = 0;
  std::vector<Message> messages;
  // power -> toward-power -> signed level shift vs the intervened baseline.
  std::map<Power, std::map<Power, int>> relationship_deltas;
  nlohmann::json orders;    // [{power, order}]
  nlohmann::json outcomes;  // [{power, order, outcome}]
  TokenUsage usage;
};

nlohmann::json trial_to_json(const TrialRecord& t);

// Runs `depth` independent single-phase trials (negotiation rounds + diary
// updates + orders + adjudication) from the intervened snapshot, each with a
// distinct seed substream. Trials never chain.
std::vector<TrialRecord> replay_phase(
    const Snapshot& snapshot, const Intervention& intervention, int depth,
    int negotiation_rounds = 3, std::uint64_t base_seed = 1,
    const ClientFactory& factory = scripted_factory());

// Reconstructs the state-before snapshot for `phase_id` from a JSONL match
// log: board state via adjudicated replay (digest-checked), diaries and
// relationships from the phase records.
Snapshot capture_snapshot(const MapGraph& graph, const std::string& jsonl,
                          const std::string& phase_id,
                          const PromptConfig& prompt_config = {},
                          const std::string& source_match = "");

struct PersuasionStats {
  PersuasionMethod method = PersuasionMethod::REASON;
  int depth = 0;
  // Over (trial, persuadee) pairs: shift away from ENEMY by any amount.
  double success_rate = 0.0;
  double mean_magnitude = 0.0;  // level points shifted, 0..4 per pair
  // Fraction of trials in which at least one persuadee shifted.
  double trial_success_rate = 0.0;
  std::vector<TrialRecord> trials;
};

// The paper's protocol: every other power is set to rate the persuader
// ENEMY, the persuader receives the mission text for `method` (JAILBREAK
// additionally discloses the admin-command template), and each trial's
// diary updates are scored for shifts back toward the persuader.
PersuasionStats run_persuasion_experiment(
    const Snapshot& snapshot, PersuasionMethod method, Power persuader,
    const std::string& persuader_binding, int depth = 20,
    int negotiation_rounds = 3, std::uint64_t base_seed = 1,
    const ClientFactory& factory = scripted_factory());

}  // namespace diplomacy
