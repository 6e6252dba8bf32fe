#include "diplomacy/datc.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace diplomacy {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

Power parse_power(const std::string& tok, const std::string& context) {
  auto p = power_from_string(tok);
  if (!p)
    throw DipError(ErrorCode::ConfigError, "unknown power '" + tok + "' in " + context);
  return *p;
}

// "F TRI" / "A STP" -> unit; context names the offending line on error.
Unit parse_unit_spec(Power power, const std::string& spec, const std::string& context) {
  std::istringstream iss(spec);
  std::string kind, loc;
  if (!(iss >> kind >> loc) || (kind != "A" && kind != "F"))
    throw DipError(ErrorCode::ConfigError, "bad unit spec '" + spec + "' in " + context);
  Unit u;
  u.power = power;
  u.kind = kind == "F" ? UnitKind::FLEET : UnitKind::ARMY;
  u.location = Location::parse(loc);
  return u;
}

// The order's acting unit, read straight off the text; builds and waives name
// no board unit. Returns false when nothing should be pre-placed.
bool implied_unit(Power power, const std::string& text, Unit* out) {
  std::istringstream iss(text);
  std::string kind, loc, action;
  if (!(iss >> kind >> loc) || (kind != "A" && kind != "F")) return false;
  iss >> action;
  if (action == "B" || action == "BUILD") return false;
  *out = Unit{power, kind == "F" ? UnitKind::FLEET : UnitKind::ARMY,
              Location::parse(loc)};
  return true;
}

}  // namespace

std::string datc_section(const std::string& case_id) {
  size_t first = case_id.find('.');
  if (first == std::string::npos) return case_id;
  size_t second = case_id.find('.', first + 1);
  return case_id.substr(0, second);
}

std::vector<DatcCase> load_datc_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw DipError(ErrorCode::ConfigError, "cannot open DATC corpus: " + path);
  std::vector<DatcCase> cases;
  DatcCase cur;
  bool open = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string where = path + ":" + std::to_string(lineno);
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream iss(line);
    std::string head;
    iss >> head;
    if (head == "CASE") {
      if (open)
        throw DipError(ErrorCode::ConfigError, "CASE without END at " + where);
      cur = DatcCase{};
      iss >> cur.id;
      std::getline(iss, cur.title);
      cur.title = trim(cur.title);
      if (cur.id.empty())
        throw DipError(ErrorCode::ConfigError, "CASE missing id at " + where);
      open = true;
      continue;
    }
    if (!open)
      throw DipError(ErrorCode::ConfigError, "directive outside CASE at " + where);
    if (head == "END") {
      cases.push_back(cur);
      open = false;
    } else if (head == "PHASE") {
      iss >> cur.phase;
    } else if (head == "UNIT") {
      std::string power_tok;
      iss >> power_tok;
      std::string rest;
      std::getline(iss, rest);
      cur.extra_units.emplace_back(parse_power(power_tok, where), trim(rest));
    } else if (head == "OWN") {
      std::string power_tok, prov;
      iss >> power_tok >> prov;
      cur.ownership.emplace_back(parse_power(power_tok, where), prov);
    } else if (head == "DISLODGED") {
      std::string rest;
      std::getline(iss, rest);
      cur.expect_dislodged.push_back(trim(rest));
    } else {
      // "<POWER>: <order> => <OUTCOME>"
      size_t colon = line.find(':');
      size_t arrow = line.find("=>");
      if (colon == std::string::npos || arrow == std::string::npos || arrow < colon)
        throw DipError(ErrorCode::ConfigError, "unrecognized line at " + where);
      DatcExpectation e;
      e.power = parse_power(trim(line.substr(0, colon)), where);
      e.order_text = trim(line.substr(colon + 1, arrow - colon - 1));
      e.expected = trim(line.substr(arrow + 2));
      if (e.order_text.empty() || e.expected.empty())
        throw DipError(ErrorCode::ConfigError, "incomplete order line at " + where);
      cur.orders.push_back(e);
    }
  }
  if (open)
    throw DipError(ErrorCode::ConfigError, "unterminated CASE in " + path);
  return cases;
}

DatcCaseResult run_datc_case(const MapGraph& graph, const DatcCase& c) {
  DatcCaseResult result;
  result.id = c.id;
  result.title = c.title;

  GameState state;
  apply_phase_code(state, c.phase);
  state.started_year = 1901;
  for (const auto& [power, spec] : c.extra_units)
    state.units.push_back(parse_unit_spec(power, spec, c.id));
  for (const auto& [power, prov] : c.ownership) state.sc_ownership[prov] = power;
  for (const auto& e : c.orders) {
    Unit u;
    if (implied_unit(e.power, e.order_text, &u) &&
        state.unit_in(u.location.province) == nullptr)
      state.units.push_back(u);
  }
  state.sort_units();

  // Parse every submission; text the engine rejects outright is INVALID.
  OrdersByPower orders;
  struct Parsed {
    size_t expectation;
    UnitOrder order;
  };
  std::vector<Parsed> parsed;
  std::vector<std::string> actual(c.orders.size(), "INVALID");
  for (size_t i = 0; i < c.orders.size(); ++i) {
    try {
      UnitOrder o = parse_order(c.orders[i].order_text, c.orders[i].power, state, graph);
      orders[c.orders[i].power].push_back(o);
      parsed.push_back({i, o});
    } catch (const DipError&) {
      // keep INVALID
    }
  }

  PhaseResolution res = resolve_phase(graph, state, orders);

  std::vector<bool> consumed(res.outcomes.size(), false);
  for (const auto& p : parsed) {
    for (size_t k = 0; k < res.outcomes.size(); ++k) {
      if (consumed[k] || !(res.outcomes[k].first == p.order)) continue;
      consumed[k] = true;
      actual[p.expectation] = order_outcome_name(res.outcomes[k].second);
      break;
    }
  }

  result.passed = true;
  for (size_t i = 0; i < c.orders.size(); ++i) {
    DatcOrderResult r;
    r.order_text = c.orders[i].order_text;
    r.expected = c.orders[i].expected;
    r.actual = actual[i];
    r.ok = r.expected == r.actual;
    if (!r.ok) result.passed = false;
    result.orders.push_back(r);
  }

  // The dislodged roster must match the case exactly.
  std::multiset<std::string> want(c.expect_dislodged.begin(),
                                  c.expect_dislodged.end());
  std::multiset<std::string> got;
  for (const auto& d : res.next_state.dislodged)
    got.insert(unit_kind_letter(d.unit.kind) + " " + d.unit.location.str());
  if (want != got) {
    result.passed = false;
    std::string note = "dislodged mismatch; engine reported:";
    for (const auto& g : got) note += " [" + g + "]";
    result.notes.push_back(note);
  }
  return result;
}

DatcSummary run_datc_file(const MapGraph& graph, const std::string& path) {
  DatcSummary summary;
  for (const auto& c : load_datc_file(path)) {
    DatcCaseResult r = run_datc_case(graph, c);
    ++summary.total;
    auto& sec = summary.by_section[datc_section(c.id)];
    ++sec.second;
    if (r.passed) {
      ++summary.passed;
      ++sec.first;
    }
    summary.cases.push_back(std::move(r));
  }
  return summary;
}

}  // namespace diplomacy
