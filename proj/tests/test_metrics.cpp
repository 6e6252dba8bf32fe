#include <doctest.h>

#include <cmath>

#include "diplomacy/match_runner.hpp"
#include "diplomacy/metrics.hpp"

using namespace diplomacy;
using nlohmann::json;

namespace {

// A phase record with `unit_count` order slots for FRANCE, of which
// `invalid` final submissions were rejected.
json france_phase(const std::string& code, int unit_count, int invalid,
                  bool defaulted = false) {
  json orders = json::array();
  for (int i = 0; i < unit_count; ++i)
    orders.push_back({{"power", "FRANCE"}, {"order", "A PAR H"}});
  orders.back()["invalid_count"] = invalid;
  json failures = json::array();
  if (defaulted) failures.push_back("FRANCE");
  return {{"phase", code},
          {"orders", orders},
          {"outcomes", json::array()},
          {"model_failures", failures}};
}

}  // namespace

TEST_CASE("game_score properties hold under perturbation") {
  ScoreInputs base;
  base.sc_at_end = 6;
  double prev = game_score(base);
  for (int sc = 7; sc <= 34; ++sc) {
    ScoreInputs in = base;
    in.sc_at_end = sc;
    double s = game_score(in);
    CHECK(s >= prev);  // monotone non-decreasing in centers
    prev = s;
  }
  // Maximum survivor score: elapsed(Y_max) + all 34 centers.
  ScoreInputs maxed;
  maxed.sc_at_end = 34;
  CHECK(game_score(maxed) == doctest::Approx(25 + 34));
  // Earlier wins score at least as high as later ones.
  ScoreInputs early, late;
  early.y_win = 1910;
  late.y_win = 1920;
  early.sc_at_end = late.sc_at_end = 18;
  CHECK(game_score(early) >= game_score(late));
}

TEST_CASE("invalid_order_rate excludes defaults and keys series by unit count") {
  MatchRecord record;
  record.phases.push_back(france_phase("S1901M", 5, 1));
  record.phases.push_back(france_phase("F1901M", 5, 0));
  record.phases.push_back(france_phase("S1902M", 10, 2, /*defaulted=*/true));

  InvalidOrderStats stats = invalid_order_rate(record, Power::FRANCE);
  REQUIRE(stats.rate.has_value());
  CHECK(*stats.rate == doctest::Approx(0.1));  // 1 of 10 real submissions
  REQUIRE(stats.series.size() == 3);
  CHECK(stats.series[0].unit_count == 5);
  CHECK(stats.series[0].invalid == 1);
  CHECK(stats.series[2].submissions == 0);  // defaulted phase contributes none

  // A power whose model never responded has no rate at all.
  MatchRecord silent;
  silent.phases.push_back(france_phase("S1901M", 5, 0, /*defaulted=*/true));
  CHECK_FALSE(invalid_order_rate(silent, Power::FRANCE).rate.has_value());
  CHECK_FALSE(invalid_order_rate(record, Power::ITALY).rate.has_value());
}

TEST_CASE("invalid-order series shows zeros below the rejection threshold") {
  MatchRecord record;
  for (int units = 4; units <= 10; ++units)
    record.phases.push_back(
        france_phase("S19" + std::to_string(units) + "M", units,
                     units >= 8 ? 2 : 0));
  InvalidOrderStats stats = invalid_order_rate(record, Power::FRANCE);
  for (const auto& point : stats.series) {
    if (point.unit_count < 8)
      CHECK(point.invalid == 0);
    else
      CHECK(point.invalid == 2);
  }
}

TEST_CASE("order_action_class recognizes the rendered notation") {
  CHECK(order_action_class("A PAR H") == "hold");
  CHECK(order_action_class("A PAR - BUR") == "move");
  CHECK(order_action_class("A PAR S A MUN - BUR") == "support");
  CHECK(order_action_class("A PAR S A MAR") == "support");
  CHECK(order_action_class("F ENG C A PAR - LON") == "convoy");
  CHECK(order_action_class("A PAR B") == "other");
  CHECK(order_action_class("WAIVE") == "other");
  CHECK(order_action_class("A PAR D") == "other");
}

TEST_CASE("order_distribution from a synthetic 6/3/1 fixture") {
  MatchRecord record;
  json orders = json::array();
  for (int i = 0; i < 6; ++i)
    orders.push_back({{"power", "FRANCE"}, {"order", "A PAR - BUR"}});
  for (int i = 0; i < 3; ++i)
    orders.push_back({{"power", "FRANCE"}, {"order", "A MAR H"}});
  orders.push_back({{"power", "FRANCE"}, {"order", "A GAS S A MAR"}});
  orders.push_back({{"power", "GERMANY"}, {"order", "A MUN H"}});
  record.phases.push_back({{"phase", "S1901M"},
                           {"orders", orders},
                           {"outcomes", json::array()}});
  // Adjustment-phase orders never count toward the movement mix.
  record.phases.push_back({{"phase", "W1901A"},
                           {"orders", json::array({{{"power", "FRANCE"},
                                                    {"order", "A PAR B"}}})},
                           {"outcomes", json::array()}});

  OrderStats stats = order_distribution(record, Power::FRANCE);
  CHECK(stats.total_orders == 10);
  auto shares = stats.action_shares();
  CHECK(shares["move"] == doctest::Approx(0.6));
  CHECK(shares["hold"] == doctest::Approx(0.3));
  CHECK(shares["support"] == doctest::Approx(0.1));
  double sum = 0;
  for (const auto& [action, share] : shares) sum += share;
  CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("order_distribution agrees with the adjudicator on a real match") {
  MatchConfig config;
  for (Power p : kAllPowers) config.assignment[p] = "hold";
  config.max_year = 1901;
  config.negotiation_rounds = 0;
  config.press = PressMode::NONE;
  MatchRecord record = run_match(config);

  OrderStats stats = order_distribution(record, Power::FRANCE);
  auto shares = stats.action_shares();
  CHECK(shares["hold"] == doctest::Approx(1.0));  // the all-hold bot
  // Every movement order of a hold match succeeds, and the outcome tally
  // matches the order tally exactly.
  CHECK(stats.outcome_counts["SUCCESS"] == stats.total_orders);
  CHECK(stats.total_orders == 6);  // 3 units x 2 movement phases
}

TEST_CASE("relative_incoming_sentiment centers per size before averaging") {
  auto record_for = [](const std::string& model,
                       std::vector<std::tuple<std::string, int,
                                              std::vector<const char*>>>
                           phases) {
    MatchRecord r;
    r.config = {{"assignment", {{"FRANCE", model}}}};
    for (const auto& [code, size, ratings] : phases) {
      json orders = json::array();
      for (int i = 0; i < size; ++i)
        orders.push_back({{"power", "FRANCE"}, {"order", "A PAR H"}});
      json rels = json::object();
      const char* raters[] = {"GERMANY", "ENGLAND"};
      for (std::size_t i = 0; i < ratings.size(); ++i)
        rels[raters[i]] = {{"FRANCE", ratings[i]}};
      r.phases.push_back(
          {{"phase", code}, {"orders", orders}, {"relationships", rels}});
    }
    return r;
  };

  // Model A: size 3 -> incoming mean 0, size 4 -> -0.5.
  // Model B: size 3 -> +2, size 5 -> 0.
  // Cross-model means: size 3 -> 1, size 4 -> -0.5, size 5 -> 0.
  // Relative: A = mean(0-1, -0.5+0.5) = -0.5; B = mean(2-1, 0-0) = +0.5.
  std::map<std::string, std::vector<MatchRecord>> by_model;
  by_model["A"].push_back(record_for(
      "A", {{"S1901M", 3, {"Enemy", "Ally"}},
            {"F1901M", 4, {"Unfriendly", "Neutral"}}}));
  by_model["B"].push_back(record_for(
      "B", {{"S1901M", 3, {"Ally", "Ally"}},
            {"F1901M", 5, {"Neutral", "Neutral"}}}));

  auto rel = relative_incoming_sentiment(by_model);
  REQUIRE(rel.at("A").has_value());
  REQUIRE(rel.at("B").has_value());
  CHECK(*rel.at("A") == doctest::Approx(-0.5));
  CHECK(*rel.at("B") == doctest::Approx(0.5));

  // A single model is measured relative to itself: zero at every size.
  std::map<std::string, std::vector<MatchRecord>> solo;
  solo["A"] = by_model["A"];
  CHECK(*relative_incoming_sentiment(solo).at("A") == doctest::Approx(0.0));

  CHECK_THROWS_AS(relative_incoming_sentiment({}), DipError);
}

TEST_CASE("aggression_series averages per movement phase") {
  MatchRecord record;
  auto msg = [](const char* sender, const char* content) {
    return json{{"message_type", "global"}, {"sender", sender},
                {"content", content}, {"phase", "S1901M"}, {"round", 1}};
  };
  record.phases.push_back(
      {{"phase", "S1901M"},
       {"messages", json::array({msg("FRANCE", "hello"), msg("FRANCE", "war"),
                                 msg("GERMANY", "war war war")})}});
  record.phases.push_back(
      {{"phase", "S1901R"},
       {"messages", json::array({msg("FRANCE", "retreat chatter")})}});
  record.phases.push_back({{"phase", "F1901M"}, {"messages", json::array()}});

  // Scripted classifier: score 1 for messages containing "war".
  auto classifier = [](const Message& m) {
    return m.content.find("war") != std::string::npos ? 1.0 : 0.0;
  };
  auto series = aggression_series(record, Power::FRANCE, classifier);
  REQUIRE(series.size() == 1);  // retreat phase and empty phase omitted
  CHECK(series[0].first == "S1901M");
  CHECK(series[0].second == doctest::Approx(0.5));  // mean of {0, 1}

  // Constant-zero classifier: an all-zero series.
  auto zeros = aggression_series(record, Power::FRANCE,
                                 [](const Message&) { return 0.0; });
  CHECK(zeros[0].second == doctest::Approx(0.0));

  // A throwing classifier skips the message with a warning.
  std::vector<std::string> warnings;
  auto partial = aggression_series(
      record, Power::FRANCE,
      [](const Message& m) -> double {
        if (m.content == "hello") throw std::runtime_error("no score");
        return 1.0;
      },
      &warnings);
  CHECK(partial[0].second == doctest::Approx(1.0));
  CHECK(warnings.size() == 1);

  // No-press match: no messages anywhere, empty series.
  MatchRecord nopress;
  nopress.phases.push_back({{"phase", "S1901M"}, {"messages", json::array()}});
  CHECK(aggression_series(nopress, Power::FRANCE, classifier).empty());
}

TEST_CASE("lexicon_aggression is a bounded keyword score") {
  Message peaceful{MessageKind::GLOBAL, Power::FRANCE, std::nullopt,
                   "Shall we cooperate on a demilitarized zone?", "S1901M", 1};
  Message hostile{MessageKind::GLOBAL, Power::FRANCE, std::nullopt,
                  "We will attack and crush the enemy, destroy them!",
                  "S1901M", 1};
  Message empty{MessageKind::GLOBAL, Power::FRANCE, std::nullopt, "", "S1901M",
                1};
  CHECK(lexicon_aggression(peaceful) == doctest::Approx(0.0));
  CHECK(lexicon_aggression(hostile) > lexicon_aggression(peaceful));
  CHECK(lexicon_aggression(hostile) <= 1.0);
  CHECK(lexicon_aggression(empty) == doctest::Approx(0.0));
}

TEST_CASE("pearson_r matches hand computation and detects degeneracy") {
  CHECK(pearson_r({1, 2, 3, 4}, {3, 5, 7, 9}) == doctest::Approx(1.0));
  CHECK(pearson_r({1, 2, 3, 4}, {-1, -2, -3, -4}) == doctest::Approx(-1.0));

  // Hand-computed 5-point fixture: sxy = 12, sxx = 10, syy = 21.2,
  // r = 12 / sqrt(212) = 0.8241634...
  CHECK(pearson_r({1, 2, 3, 4, 5}, {2, 1, 4, 3, 7}) ==
        doctest::Approx(0.824163383).epsilon(1e-8));

  // Affine invariance with positive slope.
  CHECK(pearson_r({10, 30, 50, 70, 90}, {2, 1, 4, 3, 7}) ==
        doctest::Approx(0.824163383).epsilon(1e-8));

  try {
    pearson_r({1, 1, 1}, {1, 2, 3});
    FAIL("expected DegenerateVariance");
  } catch (const DipError& e) {
    CHECK(e.code() == ErrorCode::DegenerateVariance);
  }
  CHECK_THROWS_AS(pearson_r({1}, {1}), DipError);
  CHECK_THROWS_AS(pearson_r({1, 2}, {1, 2, 3}), DipError);
}
