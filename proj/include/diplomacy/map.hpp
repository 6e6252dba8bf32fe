#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "diplomacy/core.hpp"

namespace diplomacy {

enum class Terrain { LAND, COAST, WATER };

enum class UnitKind { ARMY, FLEET };

const std::string& unit_kind_letter(UnitKind k);  // "A" / "F"

struct Province {
  std::string id;            // 3-letter uppercase
  std::string display_name;  // defaults to id
  Terrain terrain = Terrain::LAND;
  bool is_supply_center = false;
  std::optional<Power> home_power;
  std::vector<std::string> coasts;  // non-empty only for split-coast provinces

  bool has_coast(const std::string& c) const;
};

// Immutable after load; all queries are pure.
class MapGraph {
 public:
  static MapGraph load(std::istream& in);
  static MapGraph load_string(const std::string& text);
  static MapGraph load_file(const std::string& path);

  const std::map<std::string, Province>& provinces() const { return provinces_; }
  const Province& province(const std::string& id) const;  // throws UnknownProvince
  bool has_province(const std::string& id) const;

  int supply_center_count() const;
  std::vector<std::string> supply_centers() const;
  std::vector<std::string> home_centers(Power p) const;

  // One-step destinations for a unit of the given kind standing at `at`.
  std::set<Location> adjacency(UnitKind kind, const Location& at) const;

  // True when a unit of `kind` at `from` may move to `to` in one step.
  bool reachable(UnitKind kind, const Location& from, const Location& to) const;
  // Coast-insensitive: some coast of `to_province` is one step away.
  bool reachable_province(UnitKind kind, const Location& from,
                          const std::string& to_province) const;

  // All legal fleet nodes for a province (coast-qualified for split coasts).
  std::vector<Location> fleet_nodes(const std::string& province) const;
  bool is_legal_location(UnitKind kind, const Location& at) const;

  // Minimum-length walk from -> to in the unit-type graph, reported as
  // province ids; lexicographic tie-breaking at each BFS frontier.
  // Provinces in `blocked` are not entered (the destination is exempt).
  std::optional<std::vector<std::string>> shortest_path(
      UnitKind kind, const Location& from, const std::string& to,
      const std::set<std::string>& blocked = {}) const;

  const std::map<std::string, std::set<std::string>>& army_adj() const {
    return army_adj_;
  }
  const std::map<Location, std::set<Location>>& fleet_adj() const {
    return fleet_adj_;
  }

 private:
  void validate() const;

  std::map<std::string, Province> provinces_;
  std::map<std::string, std::set<std::string>> army_adj_;
  std::map<Location, std::set<Location>> fleet_adj_;
};

}  // namespace diplomacy
