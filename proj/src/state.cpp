#include "diplomacy/state.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

namespace diplomacy {

std::string Unit::str() const {
  return unit_kind_letter(kind) + " " + location.str();
}

std::string season_letter(Season s) {
  switch (s) {
    case Season::SPRING: return "S";
    case Season::FALL: return "F";
    case Season::WINTER: return "W";
  }
  return "?";
}

std::string phase_kind_letter(PhaseKind k) {
  switch (k) {
    case PhaseKind::MOVEMENT: return "M";
    case PhaseKind::RETREAT: return "R";
    case PhaseKind::ADJUSTMENT: return "A";
  }
  return "?";
}

std::string GameState::phase_code() const {
  return season_letter(season) + std::to_string(year) + phase_kind_letter(phase_kind);
}

void apply_phase_code(GameState& state, const std::string& code) {
  if (code.size() < 3)
    throw DipError(ErrorCode::UnknownPhase, "phase code too short: " + code);
  switch (code.front()) {
    case 'S': state.season = Season::SPRING; break;
    case 'F': state.season = Season::FALL; break;
    case 'W': state.season = Season::WINTER; break;
    default: throw DipError(ErrorCode::UnknownPhase, "bad season in " + code);
  }
  switch (code.back()) {
    case 'M': state.phase_kind = PhaseKind::MOVEMENT; break;
    case 'R': state.phase_kind = PhaseKind::RETREAT; break;
    case 'A': state.phase_kind = PhaseKind::ADJUSTMENT; break;
    default: throw DipError(ErrorCode::UnknownPhase, "bad phase kind in " + code);
  }
  try {
    state.year = std::stoi(code.substr(1, code.size() - 2));
  } catch (const std::exception&) {
    throw DipError(ErrorCode::UnknownPhase, "bad year in " + code);
  }
}

const Unit* GameState::unit_in(const std::string& province) const {
  for (const auto& u : units)
    if (u.location.province == province) return &u;
  return nullptr;
}

std::vector<Unit> GameState::units_of(Power p) const {
  std::vector<Unit> out;
  for (const auto& u : units)
    if (u.power == p) out.push_back(u);
  return out;
}

int GameState::sc_count(Power p) const {
  int n = 0;
  for (const auto& [_, pw] : sc_ownership)
    if (pw == p) ++n;
  return n;
}

int GameState::unit_count(Power p) const {
  int n = 0;
  for (const auto& u : units)
    if (u.power == p) ++n;
  for (const auto& d : dislodged)
    if (d.unit.power == p) ++n;
  return n;
}

bool GameState::is_eliminated(Power p) const {
  return sc_count(p) == 0 && unit_count(p) == 0;
}

void GameState::sort_units() {
  std::sort(units.begin(), units.end());
  std::sort(dislodged.begin(), dislodged.end());
}

GameState GameState::opening(const MapGraph& graph) {
  GameState s;
  s.year = 1901;
  s.started_year = 1901;
  s.season = Season::SPRING;
  s.phase_kind = PhaseKind::MOVEMENT;
  for (const auto& [id, p] : graph.provinces()) {
    if (p.is_supply_center && p.home_power) s.sc_ownership[id] = *p.home_power;
  }
  struct Start {
    Power power;
    UnitKind kind;
    const char* loc;
  };
  static const Start kStarts[] = {
      {Power::AUSTRIA, UnitKind::ARMY, "VIE"},
      {Power::AUSTRIA, UnitKind::ARMY, "BUD"},
      {Power::AUSTRIA, UnitKind::FLEET, "TRI"},
      {Power::ENGLAND, UnitKind::FLEET, "LON"},
      {Power::ENGLAND, UnitKind::FLEET, "EDI"},
      {Power::ENGLAND, UnitKind::ARMY, "LVP"},
      {Power::FRANCE, UnitKind::ARMY, "PAR"},
      {Power::FRANCE, UnitKind::ARMY, "MAR"},
      {Power::FRANCE, UnitKind::FLEET, "BRE"},
      {Power::GERMANY, UnitKind::ARMY, "BER"},
      {Power::GERMANY, UnitKind::ARMY, "MUN"},
      {Power::GERMANY, UnitKind::FLEET, "KIE"},
      {Power::ITALY, UnitKind::ARMY, "ROM"},
      {Power::ITALY, UnitKind::ARMY, "VEN"},
      {Power::ITALY, UnitKind::FLEET, "NAP"},
      {Power::RUSSIA, UnitKind::ARMY, "MOS"},
      {Power::RUSSIA, UnitKind::ARMY, "WAR"},
      {Power::RUSSIA, UnitKind::FLEET, "SEV"},
      {Power::RUSSIA, UnitKind::FLEET, "STP/SC"},
      {Power::TURKEY, UnitKind::ARMY, "CON"},
      {Power::TURKEY, UnitKind::ARMY, "SMY"},
      {Power::TURKEY, UnitKind::FLEET, "ANK"},
  };
  for (const auto& st : kStarts) {
    if (!graph.has_province(Location::parse(st.loc).province)) continue;
    s.units.push_back(Unit{st.power, st.kind, Location::parse(st.loc)});
  }
  s.sort_units();
  return s;
}

void to_json(nlohmann::json& j, const Unit& u) {
  j = nlohmann::json{{"power", power_id(u.power)},
                     {"kind", unit_kind_letter(u.kind)},
                     {"location", u.location.str()}};
}

void from_json(const nlohmann::json& j, Unit& u) {
  auto p = power_from_string(j.at("power").get<std::string>());
  if (!p) throw DipError(ErrorCode::MalformedSyntax, "bad power in unit json");
  u.power = *p;
  u.kind = j.at("kind").get<std::string>() == "F" ? UnitKind::FLEET : UnitKind::ARMY;
  u.location = Location::parse(j.at("location").get<std::string>());
}

void to_json(nlohmann::json& j, const GameState& s) {
  j = nlohmann::json::object();
  j["year"] = s.year;
  j["season"] = season_letter(s.season);
  j["phase_kind"] = phase_kind_letter(s.phase_kind);
  j["started_year"] = s.started_year;
  j["units"] = s.units;
  auto sc = nlohmann::json::object();
  for (const auto& [prov, pw] : s.sc_ownership) sc[prov] = power_id(pw);
  j["sc_ownership"] = sc;
  auto dis = nlohmann::json::array();
  for (const auto& d : s.dislodged) {
    nlohmann::json dj;
    dj["unit"] = d.unit;
    dj["forbidden"] = std::vector<std::string>(d.forbidden.begin(), d.forbidden.end());
    dis.push_back(dj);
  }
  j["dislodged"] = dis;
  if (s.winner) j["winner"] = power_id(*s.winner);
}

void from_json(const nlohmann::json& j, GameState& s) {
  s = GameState{};
  s.year = j.at("year").get<int>();
  std::string sea = j.at("season").get<std::string>();
  s.season = sea == "S" ? Season::SPRING : sea == "F" ? Season::FALL : Season::WINTER;
  std::string pk = j.at("phase_kind").get<std::string>();
  s.phase_kind = pk == "M"   ? PhaseKind::MOVEMENT
                 : pk == "R" ? PhaseKind::RETREAT
                             : PhaseKind::ADJUSTMENT;
  s.started_year = j.at("started_year").get<int>();
  s.units = j.at("units").get<std::vector<Unit>>();
  for (const auto& [prov, pw] : j.at("sc_ownership").items()) {
    auto p = power_from_string(pw.get<std::string>());
    if (!p) throw DipError(ErrorCode::MalformedSyntax, "bad power in sc_ownership");
    s.sc_ownership[prov] = *p;
  }
  for (const auto& dj : j.at("dislodged")) {
    DislodgedUnit d;
    d.unit = dj.at("unit").get<Unit>();
    for (const auto& f : dj.at("forbidden")) d.forbidden.insert(f.get<std::string>());
    s.dislodged.push_back(d);
  }
  if (j.contains("winner")) {
    auto p = power_from_string(j.at("winner").get<std::string>());
    if (p) s.winner = *p;
  }
  s.sort_units();
}

std::string state_digest(const GameState& s) {
  nlohmann::json j = s;
  std::string dump = j.dump();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream oss;
  oss << std::hex << h;
  return oss.str();
}

}  // namespace diplomacy
