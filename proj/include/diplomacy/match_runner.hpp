#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diplomacy/agent.hpp"
#include "diplomacy/llm_client.hpp"
#include "diplomacy/state_repr.hpp"

namespace diplomacy {

// Resolves a model binding ("hold", "random", an endpoint name, ...) to a
// client for one power. `seed` is the power's match-derived substream seed.
using ClientFactory = std::function<std::shared_ptr<ModelClient>(
    const std::string& binding, Power power, std::uint64_t seed)>;

// Built-in offline bindings: "hold" and "random". Throws ConfigError on
// anything else.
ClientFactory scripted_factory();

// The standard world map, loaded once from the data directory.
const MapGraph& standard_world_map();

struct MatchConfig {
  std::map<Power, std::string> assignment;  // power -> model binding
  int negotiation_rounds = 3;
  int max_year = 1925;
  PressMode press = PressMode::FULL;
  PromptConfig prompt_config;
  std::uint64_t seed = 1;
  std::string output_path;  // JSONL log; empty = in-memory only
  int message_limit = 6;    // per power per negotiation round

  void validate() const;  // throws ConfigError
};

struct MatchRecord {
  nlohmann::json config;               // config snapshot
  std::vector<nlohmann::json> phases;  // one object per phase, engine order
  nlohmann::json summary;
  std::vector<AgentState> final_agents;  // canonical power order

  std::string to_jsonl() const;  // phases then summary, one object per line
};

MatchRecord run_match(const MatchConfig& config,
                      const ClientFactory& factory = scripted_factory());

// Replays a JSONL log through the adjudicator; throws LogInconsistent when
// any recorded state digest fails to reproduce. Returns the phase count.
int verify_match_log(const MapGraph& graph, const std::string& jsonl);

// Rebuilds a MatchRecord from its JSONL serialization. Throws LogInconsistent
// on unparsable lines or a log missing its config or summary line.
MatchRecord match_record_from_jsonl(const std::string& jsonl);

// Game Score for one power of a finished match record.
double record_game_score(const MatchRecord& record, Power power);

struct BenchmarkResult {
  std::vector<MatchRecord> records;  // seeds 1..n
  std::vector<double> scores;
  double mean = 0.0;
  std::optional<double> ci_half_width;  // absent when n == 1
};

// The paper's protocol: the evaluated model as FRANCE against six copies of
// the opponent binding, seeds 1..n.
BenchmarkResult run_benchmark(const std::string& model_binding, int n = 20,
                              Power evaluated_power = Power::FRANCE,
                              const std::string& opponent_binding = "hold",
                              MatchConfig base = {},
                              const ClientFactory& factory = scripted_factory());

}  // namespace diplomacy
