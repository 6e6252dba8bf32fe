#include "diplomacy/orders.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>

namespace diplomacy {

namespace {

// A handful of common long-form aliases on top of the canonical 3-letter ids.
const std::pair<const char*, const char*> kAliases[] = {
    {"GOL", "LYO"}, {"GOB", "BOT"}, {"MID", "MAO"}, {"TYN", "TYS"},
};

std::string canonical_province(const std::string& id) {
  for (const auto& [alias, canon] : kAliases)
    if (id == alias) return canon;
  return id;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::string spaced;
  for (char c : text) {
    if (c == '-') {
      spaced += " - ";
    } else {
      spaced.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  std::istringstream iss(spaced);
  std::vector<std::string> toks;
  std::string t;
  while (iss >> t) toks.push_back(t);
  return toks;
}

bool is_kind_token(const std::string& t) { return t == "A" || t == "F"; }

UnitKind kind_from_token(const std::string& t) {
  return t == "F" ? UnitKind::FLEET : UnitKind::ARMY;
}

Location parse_location_token(const std::string& tok, const MapGraph& graph) {
  Location loc = Location::parse(tok);
  loc.province = canonical_province(loc.province);
  const Province& p = graph.province(loc.province);  // throws UnknownProvince
  if (!loc.coast.empty() && !p.has_coast(loc.coast))
    throw DipError(ErrorCode::IllegalCoast,
                   loc.province + " has no coast " + loc.coast);
  return loc;
}

// Resolve the destination coast for a fleet move when the text leaves it off:
// unambiguous -> that coast; ambiguous -> IllegalCoast.
Location resolve_dest_coast(const MapGraph& graph, const Unit& unit, Location dest) {
  if (unit.kind == UnitKind::ARMY) {
    dest.coast.clear();
    return dest;
  }
  const Province& p = graph.province(dest.province);
  if (p.coasts.empty() || !dest.coast.empty()) return dest;
  std::vector<std::string> reachable;
  for (const auto& c : p.coasts)
    if (graph.reachable(UnitKind::FLEET, unit.location, Location{dest.province, c}))
      reachable.push_back(c);
  if (reachable.size() == 1) {
    dest.coast = reachable[0];
  } else if (reachable.size() > 1) {
    throw DipError(ErrorCode::IllegalCoast,
                   "ambiguous coast for fleet move to " + dest.province);
  }
  // Zero reachable coasts: leave unqualified; the order is invalid anyway.
  return dest;
}

const Unit* find_unit(const GameState& state, const std::string& province) {
  if (state.phase_kind == PhaseKind::RETREAT) {
    for (const auto& d : state.dislodged)
      if (d.unit.location.province == province) return &d.unit;
    return nullptr;
  }
  return state.unit_in(province);
}

}  // namespace

// Support legality is judged at province level: a fleet on one coast of a
// split-coast province may support into any province its province borders by
// sea, even if that coast itself cannot reach it (DATC 6.B.4/6.B.5).
bool can_support_into(const MapGraph& graph, const Unit& u,
                      const std::string& province) {
  if (u.kind == UnitKind::ARMY)
    return graph.reachable_province(UnitKind::ARMY, u.location, province);
  for (const auto& node : graph.fleet_nodes(u.location.province))
    if (graph.reachable_province(UnitKind::FLEET, node, province)) return true;
  return false;
}

const char* order_outcome_name(OrderOutcome o) {
  switch (o) {
    case OrderOutcome::SUCCESS: return "SUCCESS";
    case OrderOutcome::BOUNCE: return "BOUNCE";
    case OrderOutcome::CUT: return "CUT";
    case OrderOutcome::DISLODGED: return "DISLODGED";
    case OrderOutcome::VOID: return "VOID";
    case OrderOutcome::INVALID: return "INVALID";
  }
  return "?";
}

UnitOrder parse_order(const std::string& text, Power power,
                      const GameState& state, const MapGraph& graph) {
  auto toks = tokenize(text);
  if (toks.empty()) throw DipError(ErrorCode::MalformedSyntax, "empty order");

  UnitOrder order;
  order.unit.power = power;

  if (toks[0] == "WAIVE") {
    if (toks.size() != 1)
      throw DipError(ErrorCode::MalformedSyntax, "trailing tokens after WAIVE");
    order.type = ActionType::WAIVE;
    return order;
  }

  size_t i = 0;
  if (!is_kind_token(toks[i]))
    throw DipError(ErrorCode::MalformedSyntax, "expected unit type A or F: " + text);
  UnitKind kind = kind_from_token(toks[i++]);
  if (i >= toks.size())
    throw DipError(ErrorCode::MalformedSyntax, "missing unit location: " + text);
  Location at = parse_location_token(toks[i++], graph);

  if (i >= toks.size())
    throw DipError(ErrorCode::MalformedSyntax, "missing action: " + text);
  const std::string& act = toks[i];

  // Build orders name a prospective unit rather than one on the board.
  if (act == "B" || act == "BUILD") {
    if (i + 1 != toks.size())
      throw DipError(ErrorCode::MalformedSyntax, "trailing tokens after build");
    order.unit.kind = kind;
    order.unit.location = at;
    order.type = ActionType::BUILD;
    return order;
  }

  const Unit* u = find_unit(state, at.province);
  if (u == nullptr)
    throw DipError(ErrorCode::NotYourUnit, "no unit at " + at.province);
  if (u->power != power)
    throw DipError(ErrorCode::NotYourUnit,
                   "unit at " + at.province + " belongs to " + power_id(u->power));
  order.unit = *u;  // adopt the unit's actual kind and coast

  ++i;
  if (act == "H" || act == "HOLD" || act == "HOLDS") {
    order.type = ActionType::HOLD;
  } else if (act == "-" || act == "M" || act == "MOVE" || act == "TO") {
    if (i >= toks.size())
      throw DipError(ErrorCode::MalformedSyntax, "missing move destination: " + text);
    Location dest = parse_location_token(toks[i++], graph);
    order.type = ActionType::MOVE;
    order.target = resolve_dest_coast(graph, order.unit, dest);
    if (i < toks.size() && toks[i] == "VIA") {
      order.via_convoy = true;
      ++i;
      if (i < toks.size() && toks[i] == "CONVOY") ++i;
    }
    if (order.target.province == order.unit.location.province)
      throw DipError(ErrorCode::MalformedSyntax, "move to own province");
  } else if (act == "S" || act == "SUPPORT" || act == "SUPPORTS") {
    if (i < toks.size() && is_kind_token(toks[i])) {
      order.aux_kind = kind_from_token(toks[i++]);
    }
    if (i >= toks.size())
      throw DipError(ErrorCode::MalformedSyntax, "missing supported unit: " + text);
    Location aux = parse_location_token(toks[i++], graph);
    aux.coast.clear();
    if (const Unit* su = find_unit(state, aux.province)) {
      order.aux_kind = su->kind;
      aux = su->location;
    }
    order.aux_from = aux;
    if (i < toks.size() && (toks[i] == "-" || toks[i] == "M" || toks[i] == "TO")) {
      ++i;
      if (i >= toks.size())
        throw DipError(ErrorCode::MalformedSyntax, "missing support destination: " + text);
      Location to = parse_location_token(toks[i++], graph);
      to.coast.clear();  // supports are coast-insensitive
      order.type = ActionType::SUPPORT_MOVE;
      order.aux_to = to;
    } else if (i < toks.size() && (toks[i] == "H" || toks[i] == "HOLD" || toks[i] == "HOLDS")) {
      ++i;
      order.type = ActionType::SUPPORT_HOLD;
    } else {
      order.type = ActionType::SUPPORT_HOLD;
    }
  } else if (act == "C" || act == "CONVOY" || act == "CONVOYS") {
    if (i < toks.size() && is_kind_token(toks[i])) ++i;  // subject is always an army
    if (i >= toks.size())
      throw DipError(ErrorCode::MalformedSyntax, "missing convoyed unit: " + text);
    Location from = parse_location_token(toks[i++], graph);
    from.coast.clear();
    if (i >= toks.size() || !(toks[i] == "-" || toks[i] == "TO"))
      throw DipError(ErrorCode::MalformedSyntax, "convoy needs a destination: " + text);
    ++i;
    if (i >= toks.size())
      throw DipError(ErrorCode::MalformedSyntax, "missing convoy destination: " + text);
    Location to = parse_location_token(toks[i++], graph);
    to.coast.clear();
    order.type = ActionType::CONVOY;
    order.aux_kind = UnitKind::ARMY;
    order.aux_from = from;
    order.aux_to = to;
  } else if (act == "R" || act == "RETREAT" || act == "RETREATS") {
    if (i >= toks.size())
      throw DipError(ErrorCode::MalformedSyntax, "missing retreat destination: " + text);
    Location dest = parse_location_token(toks[i++], graph);
    order.type = ActionType::RETREAT;
    order.target = resolve_dest_coast(graph, order.unit, dest);
  } else if (act == "D" || act == "DISBAND") {
    order.type = ActionType::DISBAND;
  } else {
    throw DipError(ErrorCode::MalformedSyntax, "unknown action token " + act);
  }
  if (i != toks.size())
    throw DipError(ErrorCode::MalformedSyntax, "trailing tokens: " + text);
  return order;
}

std::string render_order(const UnitOrder& o) {
  auto unit_str = [](UnitKind k, const Location& l) {
    return unit_kind_letter(k) + " " + l.str();
  };
  switch (o.type) {
    case ActionType::HOLD:
      return unit_str(o.unit.kind, o.unit.location) + " H";
    case ActionType::MOVE:
      return unit_str(o.unit.kind, o.unit.location) + " - " + o.target.str() +
             (o.via_convoy ? " VIA" : "");
    case ActionType::SUPPORT_HOLD:
      return unit_str(o.unit.kind, o.unit.location) + " S " +
             unit_str(o.aux_kind, o.aux_from);
    case ActionType::SUPPORT_MOVE:
      return unit_str(o.unit.kind, o.unit.location) + " S " +
             unit_str(o.aux_kind, o.aux_from) + " - " + o.aux_to.province;
    case ActionType::CONVOY:
      return unit_str(o.unit.kind, o.unit.location) + " C A " +
             o.aux_from.province + " - " + o.aux_to.province;
    case ActionType::RETREAT:
      return unit_str(o.unit.kind, o.unit.location) + " R " + o.target.str();
    case ActionType::DISBAND:
      return unit_str(o.unit.kind, o.unit.location) + " D";
    case ActionType::BUILD:
      return unit_str(o.unit.kind, o.unit.location) + " B";
    case ActionType::WAIVE:
      return "WAIVE";
  }
  return "?";
}

bool convoy_chain_possible(const MapGraph& graph, const GameState& state,
                           const std::string& from_province,
                           const std::string& to_province) {
  if (!graph.has_province(from_province) || !graph.has_province(to_province))
    return false;
  if (graph.province(from_province).terrain != Terrain::COAST ||
      graph.province(to_province).terrain != Terrain::COAST)
    return false;
  // BFS through water provinces holding a fleet.
  std::set<std::string> fleet_waters;
  for (const auto& u : state.units) {
    if (u.kind == UnitKind::FLEET &&
        graph.province(u.location.province).terrain == Terrain::WATER)
      fleet_waters.insert(u.location.province);
  }
  std::deque<std::string> queue;
  std::set<std::string> seen;
  for (const auto& start : graph.fleet_nodes(from_province)) {
    for (const auto& nb : graph.adjacency(UnitKind::FLEET, start)) {
      if (fleet_waters.count(nb.province) && seen.insert(nb.province).second)
        queue.push_back(nb.province);
    }
  }
  while (!queue.empty()) {
    std::string w = queue.front();
    queue.pop_front();
    for (const auto& nb : graph.adjacency(UnitKind::FLEET, Location{w, ""})) {
      if (nb.province == to_province) return true;
      if (fleet_waters.count(nb.province) && seen.insert(nb.province).second)
        queue.push_back(nb.province);
    }
  }
  return false;
}

bool order_is_valid(const MapGraph& graph, const GameState& state,
                    const UnitOrder& o) {
  const auto unit_on_board = [&]() -> const Unit* {
    const Unit* u = find_unit(state, o.unit.location.province);
    if (u == nullptr || !(*u == o.unit)) return nullptr;
    return u;
  };
  switch (o.type) {
    case ActionType::HOLD:
      return state.phase_kind == PhaseKind::MOVEMENT && unit_on_board();
    case ActionType::MOVE: {
      if (state.phase_kind != PhaseKind::MOVEMENT || !unit_on_board()) return false;
      if (o.target.province == o.unit.location.province) return false;
      if (!graph.has_province(o.target.province)) return false;
      if (o.unit.kind == UnitKind::FLEET)
        return !o.via_convoy && graph.reachable(UnitKind::FLEET, o.unit.location, o.target);
      if (graph.province(o.target.province).terrain == Terrain::WATER) return false;
      if (!o.via_convoy && graph.reachable(UnitKind::ARMY, o.unit.location, o.target))
        return true;
      return convoy_chain_possible(graph, state, o.unit.location.province,
                                   o.target.province);
    }
    case ActionType::SUPPORT_HOLD:
      return state.phase_kind == PhaseKind::MOVEMENT && unit_on_board() &&
             graph.has_province(o.aux_from.province) &&
             o.aux_from.province != o.unit.location.province &&
             can_support_into(graph, o.unit, o.aux_from.province);
    case ActionType::SUPPORT_MOVE:
      return state.phase_kind == PhaseKind::MOVEMENT && unit_on_board() &&
             graph.has_province(o.aux_from.province) &&
             graph.has_province(o.aux_to.province) &&
             o.aux_from.province != o.unit.location.province &&
             can_support_into(graph, o.unit, o.aux_to.province);
    case ActionType::CONVOY: {
      if (state.phase_kind != PhaseKind::MOVEMENT || !unit_on_board()) return false;
      if (o.unit.kind != UnitKind::FLEET) return false;
      if (graph.province(o.unit.location.province).terrain != Terrain::WATER)
        return false;
      if (!graph.has_province(o.aux_from.province) ||
          !graph.has_province(o.aux_to.province))
        return false;
      return graph.province(o.aux_from.province).terrain == Terrain::COAST &&
             graph.province(o.aux_to.province).terrain == Terrain::COAST &&
             o.aux_from.province != o.aux_to.province;
    }
    case ActionType::RETREAT: {
      if (state.phase_kind != PhaseKind::RETREAT) return false;
      const DislodgedUnit* d = nullptr;
      for (const auto& du : state.dislodged)
        if (du.unit == o.unit) d = &du;
      if (!d) return false;
      if (!graph.has_province(o.target.province)) return false;
      if (d->forbidden.count(o.target.province)) return false;
      if (state.unit_in(o.target.province)) return false;
      return graph.reachable(o.unit.kind, o.unit.location, o.target);
    }
    case ActionType::DISBAND: {
      if (state.phase_kind == PhaseKind::RETREAT) {
        for (const auto& du : state.dislodged)
          if (du.unit == o.unit) return true;
        return false;
      }
      return state.phase_kind == PhaseKind::ADJUSTMENT && unit_on_board();
    }
    case ActionType::BUILD: {
      if (state.phase_kind != PhaseKind::ADJUSTMENT) return false;
      if (!graph.has_province(o.unit.location.province)) return false;
      const Province& p = graph.province(o.unit.location.province);
      if (!p.is_supply_center || p.home_power != o.unit.power) return false;
      auto it = state.sc_ownership.find(p.id);
      if (it == state.sc_ownership.end() || it->second != o.unit.power) return false;
      if (state.unit_in(p.id)) return false;
      return graph.is_legal_location(o.unit.kind, o.unit.location);
    }
    case ActionType::WAIVE:
      return state.phase_kind == PhaseKind::ADJUSTMENT;
  }
  return false;
}

std::map<Unit, std::vector<UnitOrder>> enumerate_possible_orders(
    const MapGraph& graph, const GameState& state, Power power) {
  std::map<Unit, std::vector<UnitOrder>> out;
  const auto own = state.units_of(power);

  if (state.phase_kind == PhaseKind::MOVEMENT) {
    for (const auto& u : own) {
      std::vector<UnitOrder> list;
      UnitOrder hold{u, ActionType::HOLD};
      list.push_back(hold);
      for (const auto& dest : graph.adjacency(u.kind, u.location)) {
        UnitOrder mv{u, ActionType::MOVE};
        mv.target = dest;
        list.push_back(mv);
      }
      for (const auto& v : own) {
        if (v == u) continue;
        if (graph.reachable_province(u.kind, u.location, v.location.province)) {
          UnitOrder sh{u, ActionType::SUPPORT_HOLD};
          sh.aux_kind = v.kind;
          sh.aux_from = v.location;
          list.push_back(sh);
        }
        for (const auto& dest : graph.adjacency(v.kind, v.location)) {
          if (dest.province == u.location.province) continue;
          if (!graph.reachable_province(u.kind, u.location, dest.province)) continue;
          UnitOrder sm{u, ActionType::SUPPORT_MOVE};
          sm.aux_kind = v.kind;
          sm.aux_from = v.location;
          sm.aux_to = Location{dest.province, ""};
          list.push_back(sm);
        }
      }
      // Single-fleet convoys for own armies within reach of this water province.
      if (u.kind == UnitKind::FLEET &&
          graph.province(u.location.province).terrain == Terrain::WATER) {
        for (const auto& a : own) {
          if (a.kind != UnitKind::ARMY) continue;
          if (!graph.reachable_province(UnitKind::FLEET, u.location,
                                        a.location.province))
            continue;
          for (const auto& dest : graph.adjacency(UnitKind::FLEET, u.location)) {
            if (dest.province == a.location.province) continue;
            if (graph.province(dest.province).terrain != Terrain::COAST) continue;
            UnitOrder cv{u, ActionType::CONVOY};
            cv.aux_kind = UnitKind::ARMY;
            cv.aux_from = a.location;
            cv.aux_to = Location{dest.province, ""};
            list.push_back(cv);
          }
        }
      }
      // De-duplicate (split coasts can repeat province-level destinations).
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
      out[u] = std::move(list);
    }
    return out;
  }

  if (state.phase_kind == PhaseKind::RETREAT) {
    for (const auto& d : state.dislodged) {
      if (d.unit.power != power) continue;
      std::vector<UnitOrder> list;
      for (const auto& dest : graph.adjacency(d.unit.kind, d.unit.location)) {
        if (d.forbidden.count(dest.province)) continue;
        if (state.unit_in(dest.province)) continue;
        UnitOrder r{d.unit, ActionType::RETREAT};
        r.target = dest;
        list.push_back(r);
      }
      list.push_back(UnitOrder{d.unit, ActionType::DISBAND});
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
      out[d.unit] = std::move(list);
    }
    return out;
  }

  // Adjustment phase.
  int delta = state.sc_count(power) - state.unit_count(power);
  if (delta > 0) {
    for (const auto& hc : graph.home_centers(power)) {
      auto it = state.sc_ownership.find(hc);
      if (it == state.sc_ownership.end() || it->second != power) continue;
      if (state.unit_in(hc)) continue;
      const Province& p = graph.province(hc);
      std::vector<UnitOrder> list;
      if (p.terrain != Terrain::WATER) {
        Unit a{power, UnitKind::ARMY, Location{hc, ""}};
        list.push_back(UnitOrder{a, ActionType::BUILD});
      }
      for (const auto& node : graph.fleet_nodes(hc)) {
        Unit f{power, UnitKind::FLEET, node};
        list.push_back(UnitOrder{f, ActionType::BUILD});
      }
      for (auto& o : list) out[o.unit].push_back(o);
    }
  } else if (delta < 0) {
    for (const auto& u : state.units_of(power)) {
      out[u].push_back(UnitOrder{u, ActionType::DISBAND});
    }
  }
  return out;
}

}  // namespace diplomacy
