#pragma once

#include <optional>
#include <string>
#include <vector>

#include "diplomacy/map.hpp"
#include "diplomacy/state.hpp"

namespace diplomacy {

struct AdjacentDetail {
  Location location;
  Terrain terrain = Terrain::LAND;
  bool is_supply_center = false;
  std::optional<Power> controller;  // SC controller, when any
  std::vector<Unit> units;          // occupants (any power)
};

struct NearestUnit {
  Unit unit;
  std::vector<std::string> path;  // starts at the scanned unit's province
};

struct NearestCenter {
  std::string province;
  std::optional<Power> controller;
  std::vector<std::string> path;
};

struct StrategicContext {
  std::vector<AdjacentDetail> adjacent_details;
  std::vector<NearestUnit> nearest_foreign_units;
  std::vector<NearestCenter> nearest_uncontrolled_or_foreign_scs;
};

inline constexpr int kNearestListCap = 5;

// Pure function of its inputs. Lists sorted by ascending path length, ties
// broken lexicographically by destination id; capped at kNearestListCap.
StrategicContext strategic_scan(const MapGraph& graph, const GameState& state,
                                Power power, const Unit& unit,
                                int cap = kNearestListCap);

}  // namespace diplomacy
