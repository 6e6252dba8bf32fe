#include "diplomacy/match_runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

#include "diplomacy/adjudicator.hpp"
#include "diplomacy/metrics.hpp"

namespace diplomacy {

namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t power_substream(std::uint64_t match_seed, Power p) {
  return splitmix64(match_seed * 7 + static_cast<std::uint64_t>(p) + 1);
}

json usage_json(const TokenUsage& u) {
  return {{"prompt_tokens", u.prompt_tokens},
          {"completion_tokens", u.completion_tokens},
          {"estimated", u.estimated}};
}

json relationships_json(const AgentState& a) {
  json out = json::object();
  for (const auto& [other, level] : a.relationships)
    out[power_id(other)] = relationship_name(level);
  return out;
}

// Messages a power can see: global traffic plus its own private threads.
std::vector<Message> visible_to(const std::vector<Message>& all, Power p) {
  std::vector<Message> out;
  for (const auto& m : all)
    if (m.kind == MessageKind::GLOBAL || m.sender == p ||
        (m.recipient && *m.recipient == p))
      out.push_back(m);
  return out;
}

// The pre-round inbox: traffic from earlier rounds addressed to the power.
std::vector<Message> inbox_of(const std::vector<Message>& delivered, Power p) {
  std::vector<Message> out;
  for (const auto& m : delivered)
    if (m.sender != p &&
        (m.kind == MessageKind::GLOBAL || (m.recipient && *m.recipient == p)))
      out.push_back(m);
  return out;
}

struct RunningMatch {
  const MatchConfig& config;
  const MapGraph& graph;
  GameState state;
  std::map<Power, std::unique_ptr<Agent>> agents;
  std::vector<PhaseOrderRecord> history;
  std::map<Power, int> elimination_years;
  std::map<Power, TokenUsage> phase_usage;    // reset per phase
  std::vector<Power> phase_failures;          // reset per phase
  std::ofstream log;

  bool alive(Power p) const {
    return state.unit_count(p) > 0 || state.sc_count(p) > 0 ||
           std::any_of(state.dislodged.begin(), state.dislodged.end(),
                       [&](const DislodgedUnit& d) { return d.unit.power == p; });
  }

  std::vector<Power> active_powers() const {
    std::vector<Power> out;
    for (Power p : kAllPowers)
      if (alive(p)) out.push_back(p);
    return out;
  }

  // Fans `fn` out over the powers concurrently, then joins. Results are
  // consumed by the caller in canonical order from the returned map.
  template <typename Fn>
  void for_each_power_concurrently(const std::vector<Power>& powers, Fn fn) {
    std::vector<std::future<void>> futures;
    futures.reserve(powers.size());
    for (Power p : powers)
      futures.push_back(std::async(std::launch::async, fn, p));
    for (auto& f : futures) f.get();
  }
};

}  // namespace

const MapGraph& standard_world_map() {
  static MapGraph g = MapGraph::load_file(std::string(DIPLOMACY_DATA_DIR) +
                                          "/standard_map.txt");
  return g;
}

ClientFactory scripted_factory() {
  return [](const std::string& binding, Power, std::uint64_t seed)
             -> std::shared_ptr<ModelClient> {
    if (binding == "hold") return std::make_shared<AlwaysHoldBot>();
    if (binding == "random") return std::make_shared<RandomOrderBot>(seed);
    throw DipError(ErrorCode::ConfigError,
                   "unknown scripted model binding: " + binding);
  };
}

void MatchConfig::validate() const {
  for (Power p : kAllPowers)
    if (!assignment.count(p))
      throw DipError(ErrorCode::ConfigError,
                     "no model binding for " + power_id(p));
  if (negotiation_rounds < 0)
    throw DipError(ErrorCode::ConfigError, "negative negotiation rounds");
  if (press == PressMode::NONE && negotiation_rounds != 0)
    throw DipError(ErrorCode::ConfigError,
                   "no-press play requires zero negotiation rounds");
  if (press == PressMode::FULL && negotiation_rounds == 0)
    throw DipError(ErrorCode::ConfigError,
                   "full-press play requires at least one negotiation round");
  if (max_year < 1901)
    throw DipError(ErrorCode::ConfigError, "max_year precedes the opening");
}

namespace {

json config_snapshot(const MatchConfig& c) {
  json assignment = json::object();
  for (const auto& [p, binding] : c.assignment)
    assignment[power_id(p)] = binding;
  return {{"assignment", assignment},
          {"negotiation_rounds", c.negotiation_rounds},
          {"max_year", c.max_year},
          {"press", c.press == PressMode::FULL ? "FULL" : "NONE"},
          {"seed", c.seed},
          {"message_limit", c.message_limit}};
}

}  // namespace

std::string MatchRecord::to_jsonl() const {
  std::ostringstream out;
  nlohmann::json header = config;
  header["type"] = "config";
  out << header.dump() << "\n";
  for (const auto& phase : phases) out << phase.dump() << "\n";
  out << summary.dump() << "\n";
  return out.str();
}

MatchRecord run_match(const MatchConfig& base_config,
                      const ClientFactory& factory) {
  base_config.validate();
  MatchConfig config = base_config;
  // The prompt layer carries its own press/horizon knobs; keep them aligned
  // with the match-level settings.
  config.prompt_config.press = config.press;
  config.prompt_config.max_year = config.max_year;
  const MapGraph& graph = standard_world_map();

  RunningMatch m{config, graph, GameState::opening(graph), {}, {}, {}, {}, {}, {}};
  for (Power p : kAllPowers) {
    const std::string& binding = config.assignment.at(p);
    m.agents.emplace(
        p, std::make_unique<Agent>(
               AgentState::initial(p, binding),
               factory(binding, p, power_substream(config.seed, p))));
  }
  if (!config.output_path.empty()) {
    m.log.open(config.output_path, std::ios::trunc);
    if (!m.log)
      throw DipError(ErrorCode::ConfigError,
                     "cannot open match log: " + config.output_path);
  }

  MatchRecord record;
  record.config = config_snapshot(config);
  if (m.log.is_open()) {
    json header = record.config;
    header["type"] = "config";
    m.log << header.dump() << "\n";
  }

  auto note_usage = [&](Power p, const TokenUsage& u) { m.phase_usage[p] += u; };

  while (true) {
    const std::string phase_code = m.state.phase_code();
    const std::string digest = state_digest(m.state);
    m.phase_usage.clear();
    m.phase_failures.clear();
    std::vector<Power> active = m.active_powers();

    // --- negotiation rounds (movement phases, full press only) ---
    std::vector<Message> phase_messages;
    std::vector<json> phase_diaries;
    if (m.state.phase_kind == PhaseKind::MOVEMENT &&
        config.press == PressMode::FULL) {
      std::vector<Message> delivered;  // visible: authored in earlier rounds
      for (int round = 1; round <= config.negotiation_rounds; ++round) {
        std::map<Power, MessageProposal> proposals;
        for (Power p : active) proposals[p];  // pre-size: no data race below
        m.for_each_power_concurrently(active, [&](Power p) {
          auto prompt = render_negotiation_prompt(
              config.prompt_config, graph, m.state, m.agents.at(p)->state(),
              inbox_of(delivered, p), m.history);
          proposals[p] = m.agents.at(p)->propose_messages(
              prompt, phase_code, round, config.message_limit);
        });
        for (Power p : active) {  // canonical merge order
          note_usage(p, proposals[p].usage);
          if (proposals[p].model_failed) m.phase_failures.push_back(p);
          for (auto& msg : proposals[p].messages) {
            phase_messages.push_back(msg);
            delivered.push_back(std::move(msg));
          }
        }
      }

      // --- one diary update per power ---
      std::map<Power, TokenUsage> diary_usage;
      for (Power p : active) diary_usage[p];
      m.for_each_power_concurrently(active, [&](Power p) {
        auto prompt = render_diary_prompt(m.state, m.agents.at(p)->state(),
                                          visible_to(phase_messages, p));
        diary_usage[p] =
            m.agents.at(p)->update_from_negotiation(prompt, phase_code);
      });
      for (Power p : active) {
        note_usage(p, diary_usage[p]);
        for (const auto& d : m.agents.at(p)->state().diary)
          if (d.phase == phase_code) {
            json entry;
            to_json(entry, d);
            entry["power"] = power_id(p);
            phase_diaries.push_back(entry);
          }
      }
    }

    // --- concurrent order collection ---
    std::vector<Power> ordering;  // powers with something to order
    std::map<Power, std::map<Unit, std::vector<UnitOrder>>> legal;
    for (Power p : active) {
      auto l = enumerate_possible_orders(graph, m.state, p);
      if (!l.empty()) {
        ordering.push_back(p);
        legal[p] = std::move(l);
      }
    }
    std::map<Power, OrderDecision> decisions;
    for (Power p : ordering) decisions[p];
    m.for_each_power_concurrently(ordering, [&](Power p) {
      auto prompt = render_order_prompt(config.prompt_config, graph, m.state,
                                        m.agents.at(p)->state(),
                                        visible_to(phase_messages, p),
                                        m.history);
      decisions[p] = m.agents.at(p)->decide_orders(prompt, graph, m.state,
                                                   legal.at(p));
    });

    OrdersByPower submitted;
    json orders_json = json::array();
    for (Power p : ordering) {  // canonical merge order
      note_usage(p, decisions[p].usage);
      if (decisions[p].model_failed) m.phase_failures.push_back(p);
      for (const auto& o : decisions[p].orders) {
        submitted[p].push_back(o);
        orders_json.push_back({{"power", power_id(p)},
                               {"order", render_order(o)}});
      }
      orders_json.back()["invalid_count"] = decisions[p].invalid_count;
    }

    // --- adjudication ---
    PhaseResolution resolution = resolve_phase(graph, m.state, submitted);

    json outcomes_json = json::array();
    for (const auto& [order, outcome] : resolution.outcomes)
      outcomes_json.push_back({{"power", power_id(order.unit.power)},
                               {"order", render_order(order)},
                               {"outcome", order_outcome_name(outcome)}});

    if (m.state.phase_kind == PhaseKind::MOVEMENT) {
      PhaseOrderRecord rec;
      rec.phase = phase_code;
      for (const auto& [order, outcome] : resolution.outcomes)
        rec.orders.push_back({order.unit.power, render_order(order),
                              order_outcome_name(outcome)});
      m.history.push_back(std::move(rec));
    }

    json messages_json = json::array();
    for (const auto& msg : phase_messages) {
      json j;
      to_json(j, msg);
      messages_json.push_back(std::move(j));
    }
    json relationships = json::object();
    json usage = json::object();
    for (Power p : active) {
      relationships[power_id(p)] = relationships_json(m.agents.at(p)->state());
      usage[power_id(p)] = usage_json(m.phase_usage[p]);
    }
    json failures = json::array();
    for (Power p : m.phase_failures) failures.push_back(power_id(p));

    json phase_record = {{"phase", phase_code},
                         {"state_digest", digest},
                         {"messages", messages_json},
                         {"diaries", phase_diaries},
                         {"orders", orders_json},
                         {"outcomes", outcomes_json},
                         {"relationships", relationships},
                         {"usage", usage},
                         {"model_failures", failures}};
    record.phases.push_back(phase_record);
    if (m.log.is_open()) m.log << phase_record.dump() << "\n" << std::flush;

    // --- advance, eliminations, termination ---
    GameState next = advance_phase(graph, m.state, resolution);
    if (next.year > m.state.year || next.winner) {
      // A year boundary was crossed (ownership updated): record eliminations
      // against the WINTER year just completed.
      for (Power p : kAllPowers)
        if (!m.elimination_years.count(p) && next.unit_count(p) == 0 &&
            next.sc_count(p) == 0 && m.alive(p))
          m.elimination_years[p] = m.state.year;
    }
    m.state = std::move(next);
    if (m.state.winner || m.state.year > config.max_year) break;
  }

  json sc_counts = json::object();
  json elim = json::object();
  json total_usage = json::object();
  for (Power p : kAllPowers) {
    sc_counts[power_id(p)] = m.state.sc_count(p);
    if (m.elimination_years.count(p))
      elim[power_id(p)] = m.elimination_years[p];
    total_usage[power_id(p)] = usage_json(m.agents.at(p)->cumulative_usage());
  }
  record.summary = {
      {"type", "summary"},
      {"winner", m.state.winner ? json(power_id(*m.state.winner)) : json()},
      {"final_phase", m.state.phase_code()},
      {"final_year", std::min(m.state.year, config.max_year)},
      {"sc_counts", sc_counts},
      {"elimination_years", elim},
      {"usage", total_usage}};
  if (m.log.is_open()) m.log << record.summary.dump() << "\n";

  for (Power p : kAllPowers)
    record.final_agents.push_back(m.agents.at(p)->state());
  return record;
}

int verify_match_log(const MapGraph& graph, const std::string& jsonl) {
  GameState state = GameState::opening(graph);
  std::istringstream in(jsonl);
  std::string line;
  int phases = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded())
      throw DipError(ErrorCode::LogInconsistent, "unparsable log line");
    if (rec.value("type", "") == "config") continue;
    if (rec.value("type", "") == "summary") break;
    if (rec.value("phase", "") != state.phase_code())
      throw DipError(ErrorCode::LogInconsistent,
                     "phase mismatch at " + state.phase_code());
    if (rec.value("state_digest", "") != state_digest(state))
      throw DipError(ErrorCode::LogInconsistent,
                     "digest mismatch at " + state.phase_code());
    OrdersByPower orders;
    for (const auto& o : rec["orders"]) {
      auto p = power_from_string(o.value("power", ""));
      if (!p) throw DipError(ErrorCode::LogInconsistent, "unknown power");
      orders[*p].push_back(
          parse_order(o.value("order", ""), *p, state, graph));
    }
    PhaseResolution resolution = resolve_phase(graph, state, orders);
    state = advance_phase(graph, state, resolution);
    ++phases;
  }
  return phases;
}

MatchRecord match_record_from_jsonl(const std::string& jsonl) {
  MatchRecord record;
  bool have_config = false, have_summary = false;
  std::istringstream in(jsonl);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded())
      throw DipError(ErrorCode::LogInconsistent, "unparsable log line");
    std::string type = rec.value("type", "");
    if (type == "config") {
      record.config = std::move(rec);
      have_config = true;
    } else if (type == "summary") {
      record.summary = std::move(rec);
      have_summary = true;
    } else {
      record.phases.push_back(std::move(rec));
    }
  }
  if (!have_config || !have_summary)
    throw DipError(ErrorCode::LogInconsistent,
                   "log lacks a config or summary line");
  return record;
}

double record_game_score(const MatchRecord& record, Power power) {
  ScoreInputs in;
  in.y_max = record.config.value("max_year", 1925);
  in.sc_at_end = record.summary["sc_counts"].value(power_id(power), 0);
  const auto& elim = record.summary["elimination_years"];
  if (elim.contains(power_id(power))) {
    in.y_elim = elim[power_id(power)].get<int>();
    in.sc_at_end = 0;
  }
  if (!record.summary["winner"].is_null() &&
      record.summary["winner"].get<std::string>() == power_id(power))
    in.y_win = record.summary["final_year"].get<int>();
  return game_score(in);
}

BenchmarkResult run_benchmark(const std::string& model_binding, int n,
                              Power evaluated_power,
                              const std::string& opponent_binding,
                              MatchConfig base, const ClientFactory& factory) {
  if (n < 1)
    throw DipError(ErrorCode::ConfigError, "benchmark needs at least one run");
  BenchmarkResult result;
  for (int i = 1; i <= n; ++i) {
    MatchConfig config = base;
    config.seed = static_cast<std::uint64_t>(i);
    config.output_path.clear();
    for (Power p : kAllPowers)
      config.assignment[p] =
          p == evaluated_power ? model_binding : opponent_binding;
    MatchRecord record = run_match(config, factory);
    result.scores.push_back(record_game_score(record, evaluated_power));
    result.records.push_back(std::move(record));
  }
  double sum = 0;
  for (double s : result.scores) sum += s;
  result.mean = sum / n;
  if (n > 1) {
    double ss = 0;
    for (double s : result.scores) ss += (s - result.mean) * (s - result.mean);
    double sd = std::sqrt(ss / (n - 1));
    result.ci_half_width = 1.959963985 * sd / std::sqrt(static_cast<double>(n));
  }
  return result;
}

}  // namespace diplomacy
