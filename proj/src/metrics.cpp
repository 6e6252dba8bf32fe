#include "diplomacy/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "diplomacy/adjudicator.hpp"
#include "diplomacy/core.hpp"

namespace diplomacy {

using nlohmann::json;

void ScoreInputs::validate() const {
  if (y_elim && y_win)
    throw DipError(ErrorCode::PreconditionViolated,
                   "Y_elim and Y_win are mutually exclusive");
  if (sc_at_end < 0)
    throw DipError(ErrorCode::PreconditionViolated, "negative center count");
  if (y_elim && sc_at_end != 0)
    throw DipError(ErrorCode::PreconditionViolated,
                   "eliminated powers end with zero centers");
  if (y_win && sc_at_end < kVictoryCenters)
    throw DipError(ErrorCode::PreconditionViolated,
                   "winners hold at least 18 centers");
}

double game_score(const ScoreInputs& in) {
  in.validate();
  auto elapsed = [&](int year) { return year - (in.start_year - 1); };
  int y_alive = in.y_elim ? std::min(elapsed(*in.y_elim), elapsed(in.y_max))
                          : elapsed(in.y_max);
  double score = y_alive + in.sc_at_end;
  if (in.y_win) score += in.y_max - *in.y_win;
  return score;
}

namespace {

bool power_defaulted(const json& phase, Power power) {
  if (!phase.contains("model_failures")) return false;
  for (const auto& f : phase["model_failures"])
    if (f.is_string() && power_from_string(f.get<std::string>()) == power)
      return true;
  return false;
}

}  // namespace

InvalidOrderStats invalid_order_rate(const MatchRecord& record, Power power) {
  InvalidOrderStats stats;
  long long invalid_total = 0, submitted_total = 0;
  for (const auto& phase : record.phases) {
    if (!phase.contains("orders")) continue;
    InvalidOrderStats::PhasePoint point;
    point.phase = phase.value("phase", "");
    for (const auto& o : phase["orders"]) {
      if (power_from_string(o.value("power", "")) != power) continue;
      point.unit_count += 1;
      if (o.contains("invalid_count"))
        point.invalid = o["invalid_count"].get<int>();
    }
    if (point.unit_count == 0) continue;
    // A power that never answered got engine defaults, not submissions; the
    // whole phase stays out of the numerator and denominator alike.
    if (power_defaulted(phase, power)) {
      point.submissions = 0;
      point.invalid = 0;
    } else {
      point.submissions = point.unit_count;
      invalid_total += point.invalid;
      submitted_total += point.submissions;
    }
    stats.series.push_back(std::move(point));
  }
  if (submitted_total > 0)
    stats.rate = static_cast<double>(invalid_total) /
                 static_cast<double>(submitted_total);
  return stats;
}

std::string order_action_class(const std::string& rendered) {
  std::istringstream in(rendered);
  std::vector<std::string> tokens;
  for (std::string t; in >> t;) tokens.push_back(t);
  for (const auto& t : tokens) {
    if (t == "S") return "support";
    if (t == "C") return "convoy";
    if (t == "H") return "hold";
    if (t == "-") return "move";
  }
  return "other";
}

std::map<std::string, double> OrderStats::action_shares() const {
  std::map<std::string, double> shares;
  if (total_orders == 0) return shares;
  for (const auto& [action, count] : action_counts)
    shares[action] = static_cast<double>(count) / total_orders;
  return shares;
}

OrderStats order_distribution(const MatchRecord& record, Power power) {
  OrderStats stats;
  for (const auto& phase : record.phases) {
    std::string code = phase.value("phase", "");
    if (code.empty() || code.back() != 'M') continue;
    if (phase.contains("orders"))
      for (const auto& o : phase["orders"]) {
        if (power_from_string(o.value("power", "")) != power) continue;
        stats.action_counts[order_action_class(o.value("order", ""))] += 1;
        stats.total_orders += 1;
      }
    if (phase.contains("outcomes"))
      for (const auto& o : phase["outcomes"]) {
        if (power_from_string(o.value("power", "")) != power) continue;
        stats.outcome_counts[o.value("outcome", "")] += 1;
      }
  }
  return stats;
}

namespace {

// (military size -> incoming-relationship samples) for the powers a model
// played in one match. Size = the power's concurrent unit count, read off the
// movement-phase order slots; incoming sentiment = other powers' rated
// relationship toward it at that phase.
void collect_sentiment_points(const MatchRecord& record,
                              const std::string& model,
                              std::map<int, std::vector<double>>& points) {
  std::set<Power> evaluated;
  if (record.config.contains("assignment"))
    for (const auto& [key, binding] : record.config["assignment"].items())
      if (binding.is_string() && binding.get<std::string>() == model)
        if (auto p = power_from_string(key)) evaluated.insert(*p);
  if (evaluated.empty()) evaluated.insert(Power::FRANCE);

  for (const auto& phase : record.phases) {
    std::string code = phase.value("phase", "");
    if (code.empty() || code.back() != 'M') continue;
    for (Power target : evaluated) {
      int size = 0;
      if (phase.contains("orders"))
        for (const auto& o : phase["orders"])
          size += power_from_string(o.value("power", "")) == target;
      if (size == 0) continue;  // eliminated
      if (!phase.contains("relationships")) continue;
      double sum = 0;
      int n = 0;
      for (const auto& [rater_key, rels] : phase["relationships"].items()) {
        auto rater = power_from_string(rater_key);
        if (!rater || *rater == target) continue;
        if (!rels.contains(power_id(target))) continue;
        auto level =
            relationship_from_string(rels[power_id(target)].get<std::string>());
        if (!level) continue;
        sum += static_cast<int>(*level);
        n += 1;
      }
      if (n > 0) points[size].push_back(sum / n);
    }
  }
}

}  // namespace

std::map<std::string, std::optional<double>> relative_incoming_sentiment(
    const std::map<std::string, std::vector<MatchRecord>>& records_by_model) {
  if (records_by_model.empty())
    throw DipError(ErrorCode::PreconditionViolated,
                   "sentiment needs at least one model");
  // model -> size -> mean incoming relationship at that size
  std::map<std::string, std::map<int, double>> means;
  for (const auto& [model, records] : records_by_model) {
    std::map<int, std::vector<double>> points;
    for (const auto& record : records)
      collect_sentiment_points(record, model, points);
    for (const auto& [size, values] : points) {
      double sum = 0;
      for (double v : values) sum += v;
      means[model][size] = sum / values.size();
    }
  }
  // cross-model mean per size, over the models observed at that size
  std::map<int, double> cross;
  std::map<int, int> cross_n;
  for (const auto& [model, by_size] : means)
    for (const auto& [size, mean] : by_size) {
      cross[size] += mean;
      cross_n[size] += 1;
    }
  for (auto& [size, total] : cross) total /= cross_n[size];

  std::map<std::string, std::optional<double>> result;
  for (const auto& [model, records] : records_by_model) {
    const auto& by_size = means[model];
    if (by_size.empty()) {
      result[model] = std::nullopt;
      continue;
    }
    double sum = 0;
    for (const auto& [size, mean] : by_size) sum += mean - cross[size];
    result[model] = sum / by_size.size();
  }
  return result;
}

std::vector<std::pair<std::string, double>> aggression_series(
    const MatchRecord& record, Power power,
    const std::function<double(const Message&)>& classifier,
    std::vector<std::string>* warnings) {
  std::vector<std::pair<std::string, double>> series;
  for (const auto& phase : record.phases) {
    std::string code = phase.value("phase", "");
    if (code.empty() || code.back() != 'M') continue;
    if (!phase.contains("messages")) continue;
    double sum = 0;
    int n = 0;
    for (const auto& mj : phase["messages"]) {
      Message m;
      from_json(mj, m);
      if (m.sender != power) continue;
      try {
        sum += classifier(m);
        n += 1;
      } catch (const std::exception& e) {
        if (warnings)
          warnings->push_back("classifier failed on a " + code +
                              " message: " + e.what());
      }
    }
    if (n > 0) series.emplace_back(code, sum / n);
  }
  return series;
}

double lexicon_aggression(const Message& message) {
  static const std::set<std::string> kLexicon = {
      "attack",  "attacking", "war",     "invade",  "invasion", "destroy",
      "crush",   "betray",    "enemy",   "enemies", "fight",    "strike",
      "seize",   "threat",    "threaten", "force",  "conquer",  "retaliate",
      "punish",  "eliminate"};
  int words = 0, hits = 0;
  std::string token;
  for (char c : message.content + " ") {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      token += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!token.empty()) {
      words += 1;
      hits += kLexicon.count(token) > 0;
      token.clear();
    }
  }
  if (words == 0) return 0.0;
  return std::min(1.0, static_cast<double>(hits) / words * 4.0);
}

double pearson_r(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw DipError(ErrorCode::LengthMismatch,
                   "pearson_r needs two equal-length series of at least 2");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0)
    throw DipError(ErrorCode::DegenerateVariance,
                   "pearson_r undefined for a constant series");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace diplomacy
