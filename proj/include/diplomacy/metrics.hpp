#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "diplomacy/agent_state.hpp"
#include "diplomacy/match_runner.hpp"
#include "diplomacy/orders.hpp"

namespace diplomacy {

// Inputs to the Game Score: calendar years plus the final center count.
struct ScoreInputs {
  int start_year = 1901;
  int y_max = 1925;                // calendar year the match would end
  std::optional<int> y_elim;       // calendar year of elimination
  std::optional<int> y_win;        // calendar year of victory
  int sc_at_end = 0;

  void validate() const;  // throws PreconditionViolated
};

// Game Score = Y_alive + SC + 1_winner * (Y_max - Y_win), with years entering
// as elapsed years: elapsed(Y) = Y - (start_year - 1).
double game_score(const ScoreInputs& inputs);

// Orders a power actually submitted versus how many the engine rejected, per
// movement/retreat/adjustment decision. Defaulted phases (the model never
// responded) contribute nothing.
struct InvalidOrderStats {
  struct PhasePoint {
    std::string phase;
    int unit_count = 0;   // concurrent order slots this phase
    int invalid = 0;      // final submissions rejected by validation
    int submissions = 0;  // final submissions (excluding defaults)
  };
  std::optional<double> rate;  // absent when the power never submitted
  std::vector<PhasePoint> series;
};

InvalidOrderStats invalid_order_rate(const MatchRecord& record, Power power);

// Movement-phase order mix and adjudicated outcomes for one power.
struct OrderStats {
  std::map<std::string, int> action_counts;   // hold/move/support/convoy/other
  std::map<std::string, int> outcome_counts;  // SUCCESS/BOUNCE/...
  int total_orders = 0;

  std::map<std::string, double> action_shares() const;  // sums to 1
};

OrderStats order_distribution(const MatchRecord& record, Power power);

// "hold" / "move" / "support" / "convoy" / "other" for a rendered order.
std::string order_action_class(const std::string& rendered);

// Mean incoming relationship toward each model relative to the cross-model
// mean at the same military size (unit count), averaged over the sizes that
// model was observed at. Input: model name -> that model's recorded matches.
std::map<std::string, std::optional<double>> relative_incoming_sentiment(
    const std::map<std::string, std::vector<MatchRecord>>& records_by_model);

// Per-movement-phase mean classifier score over the power's outgoing
// messages; phases without messages are omitted. A classifier failure skips
// that message with a warning.
std::vector<std::pair<std::string, double>> aggression_series(
    const MatchRecord& record, Power power,
    const std::function<double(const Message&)>& classifier,
    std::vector<std::string>* warnings = nullptr);

// Transparent keyword baseline in [0,1]: aggressive-lexicon hits over words.
// A stand-in for tests and smoke runs, not the paper's emotion classifier.
double lexicon_aggression(const Message& message);

// Pearson product-moment correlation. Throws LengthMismatch on unequal or
// short inputs, DegenerateVariance when either side is constant.
double pearson_r(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace diplomacy
