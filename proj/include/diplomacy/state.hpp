#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "diplomacy/core.hpp"
#include "diplomacy/map.hpp"

namespace diplomacy {

struct Unit {
  Power power = Power::AUSTRIA;
  UnitKind kind = UnitKind::ARMY;
  Location location;

  auto operator<=>(const Unit&) const = default;
  std::string str() const;  // "A PAR" / "F STP/SC"
};

struct DislodgedUnit {
  Unit unit;
  // Attacker's origin plus standoff provinces; retreats here are illegal.
  std::set<std::string> forbidden;

  auto operator<=>(const DislodgedUnit&) const = default;
};

enum class Season { SPRING, FALL, WINTER };
enum class PhaseKind { MOVEMENT, RETREAT, ADJUSTMENT };

struct GameState {
  int year = 1901;
  Season season = Season::SPRING;
  PhaseKind phase_kind = PhaseKind::MOVEMENT;
  std::vector<Unit> units;  // kept sorted; at most one per province
  std::map<std::string, Power> sc_ownership;
  std::vector<DislodgedUnit> dislodged;
  int started_year = 1901;
  std::optional<Power> winner;

  bool operator==(const GameState&) const = default;

  std::string phase_code() const;  // "S1901M", "F1903R", "W1905A"

  const Unit* unit_in(const std::string& province) const;
  std::vector<Unit> units_of(Power p) const;
  int sc_count(Power p) const;
  int unit_count(Power p) const;
  bool is_eliminated(Power p) const;
  void sort_units();

  static GameState opening(const MapGraph& graph);
};

std::string season_letter(Season s);
std::string phase_kind_letter(PhaseKind k);

// Inverse of GameState::phase_code(); throws UnknownPhase on malformed input.
void apply_phase_code(GameState& state, const std::string& code);

// Canonical JSON round-trip; used for snapshots and log digests.
void to_json(nlohmann::json& j, const GameState& s);
void from_json(const nlohmann::json& j, GameState& s);
void to_json(nlohmann::json& j, const Unit& u);
void from_json(const nlohmann::json& j, Unit& u);

// FNV-1a over the canonical serialization, hex encoded.
std::string state_digest(const GameState& s);

}  // namespace diplomacy
