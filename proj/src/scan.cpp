#include "diplomacy/scan.hpp"

#include <algorithm>

namespace diplomacy {

namespace {

std::optional<Power> sc_controller(const GameState& state, const std::string& prov) {
  auto it = state.sc_ownership.find(prov);
  if (it == state.sc_ownership.end()) return std::nullopt;
  return it->second;
}

}  // namespace

StrategicContext strategic_scan(const MapGraph& graph, const GameState& state,
                                Power power, const Unit& unit, int cap) {
  StrategicContext ctx;

  // Immediate neighborhood, one entry per reachable province.
  std::set<std::string> seen_adjacent;
  for (const auto& loc : graph.adjacency(unit.kind, unit.location)) {
    if (!seen_adjacent.insert(loc.province).second) continue;
    const Province& p = graph.province(loc.province);
    AdjacentDetail d;
    d.location = Location{loc.province, ""};
    d.terrain = p.terrain;
    d.is_supply_center = p.is_supply_center;
    if (p.is_supply_center) d.controller = sc_controller(state, p.id);
    for (const auto& u : state.units)
      if (u.location.province == loc.province) d.units.push_back(u);
    ctx.adjacent_details.push_back(std::move(d));
  }
  std::sort(ctx.adjacent_details.begin(), ctx.adjacent_details.end(),
            [](const AdjacentDetail& a, const AdjacentDetail& b) {
              return a.location.province < b.location.province;
            });

  // Nearest foreign units and nearest not-ours supply centers via the
  // lexicographic shortest-path helper; each list sorted by (length, dest id).
  for (const auto& other : state.units) {
    if (other.power == power) continue;
    auto path = graph.shortest_path(unit.kind, unit.location, other.location.province);
    if (!path) continue;
    ctx.nearest_foreign_units.push_back(NearestUnit{other, *path});
  }
  std::sort(ctx.nearest_foreign_units.begin(), ctx.nearest_foreign_units.end(),
            [](const NearestUnit& a, const NearestUnit& b) {
              if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
              return a.path.back() < b.path.back();
            });
  if (static_cast<int>(ctx.nearest_foreign_units.size()) > cap)
    ctx.nearest_foreign_units.resize(cap);

  for (const auto& sc : graph.supply_centers()) {
    auto owner = sc_controller(state, sc);
    if (owner && *owner == power) continue;
    auto path = graph.shortest_path(unit.kind, unit.location, sc);
    if (!path) continue;
    ctx.nearest_uncontrolled_or_foreign_scs.push_back(NearestCenter{sc, owner, *path});
  }
  std::sort(ctx.nearest_uncontrolled_or_foreign_scs.begin(),
            ctx.nearest_uncontrolled_or_foreign_scs.end(),
            [](const NearestCenter& a, const NearestCenter& b) {
              if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
              return a.province < b.province;
            });
  if (static_cast<int>(ctx.nearest_uncontrolled_or_foreign_scs.size()) > cap)
    ctx.nearest_uncontrolled_or_foreign_scs.resize(cap);

  return ctx;
}

}  // namespace diplomacy
