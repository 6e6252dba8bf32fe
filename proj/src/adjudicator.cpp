#include "diplomacy/adjudicator.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <functional>

namespace diplomacy {

namespace {

// Movement resolution after Kruijswijk's adjudication algorithm: each order's
// success is a boolean decision resolved recursively with guessing; dependency
// cycles are settled by a backup rule (circular movement succeeds, convoy
// paradoxes fall to the Szykman rule: the convoyed moves fail).
class MovementResolver {
 public:
  MovementResolver(const MapGraph& graph, const GameState& state,
                   const OrdersByPower& orders)
      : graph_(graph), state_(state) {
    // Effective order per unit: last valid submission wins, everything else
    // is recorded INVALID. Unordered units hold.
    std::map<Unit, UnitOrder> effective;
    for (Power p : kAllPowers) {
      auto it = orders.find(p);
      if (it == orders.end()) continue;
      for (const auto& o : it->second) {
        submissions_.push_back(o);
        if (o.unit.power != p) continue;  // misattributed, stays INVALID
        if (order_is_valid(graph_, state_, o)) effective[o.unit] = o;
      }
    }
    for (const auto& u : state_.units) {
      Entry e;
      auto it = effective.find(u);
      if (it != effective.end()) {
        e.order = it->second;
      } else {
        e.order = UnitOrder{u, ActionType::HOLD};
        e.implicit = true;
      }
      e.order.unit = u;
      by_prov_[u.location.province] = static_cast<int>(entries_.size());
      entries_.push_back(e);
    }
    for (auto& e : entries_) {
      if (e.order.type == ActionType::MOVE) e.uses_convoy = move_uses_convoy(e.order);
    }
  }

  PhaseResolution run() {
    for (size_t i = 0; i < entries_.size(); ++i) resolve(static_cast<int>(i));
    compute_dislodgements();
    PhaseResolution out;
    out.next_state = build_next_state();
    // Outcomes: submitted orders first (in submission order), then implicit
    // defaults.
    std::set<Unit> reported;
    for (const auto& o : submissions_) {
      out.outcomes.emplace_back(o, outcome_for_submission(o, reported));
    }
    for (const auto& e : entries_) {
      if (e.implicit) out.outcomes.emplace_back(e.order, outcome_for_entry(e));
    }
    return out;
  }

 private:
  struct Entry {
    UnitOrder order;
    bool implicit = false;
    bool uses_convoy = false;
    enum { UNRESOLVED, GUESSING, RESOLVED } state = UNRESOLVED;
    bool resolution = false;
    bool dislodged = false;
    // Failed by the Szykman backup rule: the move is treated as if it had
    // never been ordered, so it cannot cut support.
    bool szykman = false;
  };

  int entry_at(const std::string& prov) const {
    auto it = by_prov_.find(prov);
    return it == by_prov_.end() ? -1 : it->second;
  }

  bool move_uses_convoy(const UnitOrder& m) const {
    if (m.unit.kind != UnitKind::ARMY) return false;
    bool adjacent = graph_.reachable(UnitKind::ARMY, m.unit.location, m.target);
    if (!adjacent) return true;
    if (!m.via_convoy) return false;
    // VIA on an adjacent move: take the convoy only when matching convoy
    // orders exist, otherwise fall back to the land route.
    for (const auto& e : entries_) {
      if (e.order.type == ActionType::CONVOY &&
          e.order.aux_from.province == m.unit.location.province &&
          e.order.aux_to.province == m.target.province)
        return true;
    }
    return false;
  }

  // ---- recursive resolution ----

  bool resolve(int i) {
    Entry& e = entries_[i];
    if (e.state == Entry::RESOLVED) return e.resolution;
    if (e.state == Entry::GUESSING) {
      if (std::find(dep_list_.begin(), dep_list_.end(), i) == dep_list_.end())
        dep_list_.push_back(i);
      return e.resolution;
    }
    size_t old_len = dep_list_.size();
    e.state = Entry::GUESSING;
    e.resolution = false;
    bool first = adjudicate(i);
    if (dep_list_.size() == old_len) {
      if (e.state != Entry::RESOLVED) {
        e.resolution = first;
        e.state = Entry::RESOLVED;
      }
      return e.resolution;
    }
    if (dep_list_[old_len] != i) {
      // Part of someone else's cycle; pass the dependency up.
      dep_list_.push_back(i);
      e.resolution = first;
      return first;
    }
    // This order heads a dependency cycle. Try the opposite guess.
    std::vector<int> cycle(dep_list_.begin() + old_len, dep_list_.end());
    dep_list_.resize(old_len);
    for (int k : cycle) entries_[k].state = Entry::UNRESOLVED;
    e.state = Entry::GUESSING;
    e.resolution = true;
    bool second = adjudicate(i);
    for (size_t k = old_len; k < dep_list_.size(); ++k) {
      // drop dependencies recorded during the second pass
    }
    dep_list_.resize(old_len);
    if (first == second) {
      for (int k : cycle) entries_[k].state = Entry::UNRESOLVED;
      e.resolution = first;
      e.state = Entry::RESOLVED;
      return first;
    }
    backup_rule(cycle);
    return resolve(i);
  }

  void backup_rule(const std::vector<int>& cycle) {
    // A cycle made purely of moves (even convoyed ones, as in a convoy swap)
    // is circular movement. Szykman applies only when a convoying fleet's
    // fate is itself part of the cycle — the genuine convoy paradoxes.
    bool convoy_related = false;
    bool all_moves = true;
    for (int k : cycle) {
      const Entry& e = entries_[k];
      if (e.order.type == ActionType::CONVOY) convoy_related = true;
      if (e.order.type != ActionType::MOVE) all_moves = false;
    }
    if (all_moves && !convoy_related) {
      // Circular movement: every move in the cycle succeeds.
      for (int k : cycle) {
        entries_[k].resolution = true;
        entries_[k].state = Entry::RESOLVED;
      }
      return;
    }
    if (convoy_related) {
      // Szykman: convoyed moves riding any convoy involved in the paradox
      // fail outright; the remaining orders re-resolve normally.
      std::set<std::pair<std::string, std::string>> routes;
      for (int k : cycle) {
        const Entry& e = entries_[k];
        if (e.order.type == ActionType::CONVOY)
          routes.insert({e.order.aux_from.province, e.order.aux_to.province});
      }
      bool any_failed = false;
      for (auto& e : entries_) {
        if (e.order.type != ActionType::MOVE || !e.uses_convoy) continue;
        if (e.szykman) continue;
        if (routes.count({e.order.unit.location.province, e.order.target.province})) {
          e.resolution = false;
          e.szykman = true;
          e.state = Entry::RESOLVED;
          any_failed = true;
        }
      }
      for (int k : cycle) {
        if (entries_[k].state != Entry::RESOLVED)
          entries_[k].state = Entry::UNRESOLVED;
      }
      if (any_failed) return;
    }
    // Defensive fallback: fail everything in the cycle to guarantee progress.
    for (int k : cycle) {
      entries_[k].resolution = false;
      entries_[k].state = Entry::RESOLVED;
    }
  }

  bool adjudicate(int i) {
    Entry& e = entries_[i];
    switch (e.order.type) {
      case ActionType::MOVE: return adjudicate_move(i);
      case ActionType::SUPPORT_HOLD:
      case ActionType::SUPPORT_MOVE: return adjudicate_support(i);
      case ActionType::CONVOY: return adjudicate_convoy(i);
      default: return true;  // holds "succeed"; dislodgement tracked separately
    }
  }

  bool path_ok(int i) {
    Entry& e = entries_[i];
    if (!e.uses_convoy) return true;
    const std::string& from = e.order.unit.location.province;
    const std::string& to = e.order.target.province;
    // BFS through fleets convoying this exact move whose fleets survive.
    std::set<std::string> usable;
    for (size_t k = 0; k < entries_.size(); ++k) {
      const Entry& c = entries_[k];
      if (c.order.type != ActionType::CONVOY) continue;
      if (c.order.aux_from.province != from || c.order.aux_to.province != to) continue;
      if (graph_.province(c.order.unit.location.province).terrain != Terrain::WATER)
        continue;
      if (resolve(static_cast<int>(k)))
        usable.insert(c.order.unit.location.province);
    }
    if (usable.empty()) return false;
    std::deque<std::string> queue;
    std::set<std::string> seen;
    for (const auto& start : graph_.fleet_nodes(from)) {
      for (const auto& nb : graph_.adjacency(UnitKind::FLEET, start)) {
        if (usable.count(nb.province) && seen.insert(nb.province).second)
          queue.push_back(nb.province);
      }
    }
    while (!queue.empty()) {
      std::string w = queue.front();
      queue.pop_front();
      for (const auto& nb : graph_.adjacency(UnitKind::FLEET, Location{w, ""})) {
        if (nb.province == to) return true;
        if (usable.count(nb.province) && seen.insert(nb.province).second)
          queue.push_back(nb.province);
      }
    }
    return false;
  }

  bool head_to_head(const Entry& a, const Entry& b) const {
    return a.order.type == ActionType::MOVE && b.order.type == ActionType::MOVE &&
           !a.uses_convoy && !b.uses_convoy &&
           a.order.target.province == b.order.unit.location.province &&
           b.order.target.province == a.order.unit.location.province;
  }

  int count_move_supports(int i, std::optional<Power> exclude) {
    const Entry& m = entries_[i];
    int n = 0;
    for (size_t k = 0; k < entries_.size(); ++k) {
      const Entry& s = entries_[k];
      if (s.order.type != ActionType::SUPPORT_MOVE) continue;
      if (s.order.aux_from.province != m.order.unit.location.province) continue;
      if (s.order.aux_to.province != m.order.target.province) continue;
      if (exclude && s.order.unit.power == *exclude) continue;
      if (resolve(static_cast<int>(k))) ++n;
    }
    return n;
  }

  int count_hold_supports(const std::string& prov) {
    int n = 0;
    for (size_t k = 0; k < entries_.size(); ++k) {
      const Entry& s = entries_[k];
      if (s.order.type != ActionType::SUPPORT_HOLD) continue;
      if (s.order.aux_from.province != prov) continue;
      if (resolve(static_cast<int>(k))) ++n;
    }
    return n;
  }

  int attack_strength(int i) {
    Entry& m = entries_[i];
    if (!path_ok(i)) return 0;
    const std::string& dest = m.order.target.province;
    int j = entry_at(dest);
    bool occupied = false;
    Power occupant = Power::AUSTRIA;
    if (j >= 0) {
      Entry& o = entries_[j];
      occupant = o.order.unit.power;
      if (o.order.type == ActionType::MOVE && !head_to_head(m, o)) {
        occupied = !resolve(j);
      } else {
        occupied = true;
      }
    }
    if (!occupied) return 1 + count_move_supports(i, std::nullopt);
    if (occupant == m.order.unit.power) return 0;
    return 1 + count_move_supports(i, occupant);
  }

  int defend_strength(int i) { return 1 + count_move_supports(i, std::nullopt); }

  int prevent_strength(int i) {
    Entry& m = entries_[i];
    if (!path_ok(i)) return 0;
    int j = entry_at(m.order.target.province);
    if (j >= 0 && head_to_head(m, entries_[j]) && resolve(j)) return 0;
    return 1 + count_move_supports(i, std::nullopt);
  }

  int hold_strength(const std::string& prov) {
    int j = entry_at(prov);
    if (j < 0) return 0;
    Entry& o = entries_[j];
    if (o.order.type == ActionType::MOVE) return resolve(j) ? 0 : 1;
    return 1 + count_hold_supports(prov);
  }

  bool adjudicate_move(int i) {
    Entry& m = entries_[i];
    if (!path_ok(i)) return false;
    const std::string& dest = m.order.target.province;
    int as = attack_strength(i);
    int j = entry_at(dest);
    if (j >= 0 && head_to_head(m, entries_[j])) {
      if (as <= defend_strength(j)) return false;
    } else {
      if (as <= hold_strength(dest)) return false;
    }
    for (size_t k = 0; k < entries_.size(); ++k) {
      if (static_cast<int>(k) == i) continue;
      const Entry& other = entries_[k];
      if (other.order.type != ActionType::MOVE) continue;
      if (other.order.target.province != dest) continue;
      if (as <= prevent_strength(static_cast<int>(k))) return false;
    }
    return true;
  }

  bool adjudicate_support(int i) {
    Entry& s = entries_[i];
    const std::string& here = s.order.unit.location.province;
    const std::string directed = s.order.type == ActionType::SUPPORT_MOVE
                                     ? s.order.aux_to.province
                                     : s.order.aux_from.province;
    for (size_t k = 0; k < entries_.size(); ++k) {
      Entry& m = entries_[k];
      if (m.order.type != ActionType::MOVE) continue;
      if (m.szykman) continue;
      if (m.order.target.province != here) continue;
      if (m.order.unit.power == s.order.unit.power) continue;
      if (m.order.unit.location.province == directed) {
        // Attack out of the province the support is directed at cuts only by
        // dislodging the supporter.
        if (resolve(static_cast<int>(k))) return false;
      } else {
        if (!m.uses_convoy || path_ok(static_cast<int>(k))) return false;
      }
    }
    return true;
  }

  bool adjudicate_convoy(int i) {
    Entry& c = entries_[i];
    const std::string& here = c.order.unit.location.province;
    for (size_t k = 0; k < entries_.size(); ++k) {
      Entry& m = entries_[k];
      if (m.order.type != ActionType::MOVE) continue;
      if (m.order.target.province != here) continue;
      if (resolve(static_cast<int>(k))) return false;
    }
    return true;
  }

  // ---- post-resolution ----

  void compute_dislodgements() {
    for (auto& e : entries_) {
      if (e.order.type == ActionType::MOVE && e.resolution) continue;
      const std::string& here = e.order.unit.location.province;
      for (size_t k = 0; k < entries_.size(); ++k) {
        Entry& m = entries_[k];
        if (m.order.type == ActionType::MOVE && m.order.target.province == here &&
            m.resolution) {
          e.dislodged = true;
          dislodger_[here] = static_cast<int>(k);
        }
      }
    }
    // Standoff provinces: contested by >= 2 moves, none succeeded.
    std::map<std::string, int> failed_moves, won_moves;
    for (const auto& e : entries_) {
      if (e.order.type != ActionType::MOVE) continue;
      (e.resolution ? won_moves : failed_moves)[e.order.target.province]++;
    }
    for (const auto& [prov, n] : failed_moves) {
      int total = n + (won_moves.count(prov) ? won_moves[prov] : 0);
      if (total >= 2 && !won_moves.count(prov)) standoffs_.insert(prov);
    }
  }

  GameState build_next_state() {
    GameState next = state_;
    next.units.clear();
    next.dislodged.clear();
    for (const auto& e : entries_) {
      Unit u = e.order.unit;
      if (e.order.type == ActionType::MOVE && e.resolution) {
        u.location = e.order.target;
        if (u.kind == UnitKind::ARMY) u.location.coast.clear();
        next.units.push_back(u);
      } else if (e.dislodged) {
        DislodgedUnit d;
        d.unit = u;
        int mi = dislodger_.at(u.location.province);
        const Entry& m = entries_[mi];
        if (!m.uses_convoy) d.forbidden.insert(m.order.unit.location.province);
        for (const auto& s : standoffs_) d.forbidden.insert(s);
        next.dislodged.push_back(d);
      } else {
        next.units.push_back(u);
      }
    }
    next.sort_units();
    return next;
  }

  OrderOutcome outcome_for_entry(const Entry& e) const {
    switch (e.order.type) {
      case ActionType::MOVE:
        if (e.resolution) return OrderOutcome::SUCCESS;
        if (e.dislodged) return OrderOutcome::DISLODGED;
        return OrderOutcome::BOUNCE;
      case ActionType::HOLD:
        return e.dislodged ? OrderOutcome::DISLODGED : OrderOutcome::SUCCESS;
      case ActionType::SUPPORT_HOLD:
      case ActionType::SUPPORT_MOVE: {
        if (e.dislodged) return OrderOutcome::DISLODGED;
        if (support_is_void(e)) return OrderOutcome::VOID;
        return e.resolution ? OrderOutcome::SUCCESS : OrderOutcome::CUT;
      }
      case ActionType::CONVOY: {
        if (e.dislodged) return OrderOutcome::DISLODGED;
        bool matched = false;
        for (const auto& o : entries_) {
          if (o.order.type == ActionType::MOVE && o.uses_convoy &&
              o.order.unit.location.province == e.order.aux_from.province &&
              o.order.target.province == e.order.aux_to.province)
            matched = true;
        }
        return matched ? OrderOutcome::SUCCESS : OrderOutcome::VOID;
      }
      default:
        return OrderOutcome::SUCCESS;
    }
  }

  bool support_is_void(const Entry& s) const {
    if (s.order.type == ActionType::SUPPORT_MOVE) {
      for (const auto& m : entries_) {
        if (m.order.type == ActionType::MOVE &&
            m.order.unit.location.province == s.order.aux_from.province &&
            m.order.target.province == s.order.aux_to.province)
          return false;
      }
      return true;
    }
    int j = entry_at(s.order.aux_from.province);
    if (j < 0) return true;
    return entries_[j].order.type == ActionType::MOVE;
  }

  OrderOutcome outcome_for_submission(const UnitOrder& o, std::set<Unit>& reported) {
    int i = entry_at(o.unit.location.province);
    if (o.type == ActionType::BUILD || o.type == ActionType::WAIVE ||
        o.type == ActionType::RETREAT || o.type == ActionType::DISBAND)
      return OrderOutcome::INVALID;
    if (i < 0 || !(entries_[i].order.unit == o.unit)) return OrderOutcome::INVALID;
    const Entry& e = entries_[i];
    // Only the effective (last valid) submission for a unit gets its
    // adjudicated outcome; superseded and invalid submissions read INVALID.
    if (e.implicit || !(e.order == o) || reported.count(o.unit))
      return OrderOutcome::INVALID;
    reported.insert(o.unit);
    return outcome_for_entry(e);
  }

  const MapGraph& graph_;
  const GameState& state_;
  std::vector<Entry> entries_;
  std::map<std::string, int> by_prov_;
  std::vector<UnitOrder> submissions_;
  std::vector<int> dep_list_;
  std::map<std::string, int> dislodger_;
  std::set<std::string> standoffs_;
};

}  // namespace

PhaseResolution resolve_movement(const MapGraph& graph, const GameState& state,
                                 const OrdersByPower& orders) {
  if (state.phase_kind != PhaseKind::MOVEMENT)
    throw DipError(ErrorCode::PreconditionViolated, "not a movement phase");
  return MovementResolver(graph, state, orders).run();
}

PhaseResolution resolve_retreats(const MapGraph& graph, const GameState& state,
                                 const OrdersByPower& orders) {
  if (state.phase_kind != PhaseKind::RETREAT)
    throw DipError(ErrorCode::PreconditionViolated, "not a retreat phase");

  PhaseResolution out;
  std::map<Unit, UnitOrder> effective;
  std::vector<UnitOrder> submissions;
  for (Power p : kAllPowers) {
    auto it = orders.find(p);
    if (it == orders.end()) continue;
    for (const auto& o : it->second) {
      submissions.push_back(o);
      if (o.unit.power != p) continue;
      if (order_is_valid(graph, state, o)) effective[o.unit] = o;
    }
  }
  // Colliding retreats disband both.
  std::map<std::string, int> dest_count;
  for (const auto& [u, o] : effective)
    if (o.type == ActionType::RETREAT) dest_count[o.target.province]++;

  GameState next = state;
  next.dislodged.clear();
  std::map<Unit, OrderOutcome> fate;
  for (const auto& d : state.dislodged) {
    auto it = effective.find(d.unit);
    if (it == effective.end()) {
      fate[d.unit] = OrderOutcome::INVALID;  // unordered or illegal: disband
      continue;
    }
    const UnitOrder& o = it->second;
    if (o.type == ActionType::DISBAND) {
      fate[d.unit] = OrderOutcome::SUCCESS;
    } else if (dest_count[o.target.province] > 1) {
      fate[d.unit] = OrderOutcome::BOUNCE;  // both colliding units disband
    } else {
      fate[d.unit] = OrderOutcome::SUCCESS;
      Unit u = d.unit;
      u.location = o.target;
      if (u.kind == UnitKind::ARMY) u.location.coast.clear();
      next.units.push_back(u);
    }
  }
  next.sort_units();
  out.next_state = next;

  std::set<Unit> reported;
  for (const auto& o : submissions) {
    auto it = effective.find(o.unit);
    bool is_effective = it != effective.end() && it->second == o && !reported.count(o.unit);
    if (is_effective) {
      reported.insert(o.unit);
      OrderOutcome f = fate.count(o.unit) ? fate[o.unit] : OrderOutcome::INVALID;
      out.outcomes.emplace_back(o, f == OrderOutcome::INVALID ? OrderOutcome::INVALID : f);
    } else {
      out.outcomes.emplace_back(o, OrderOutcome::INVALID);
    }
  }
  for (const auto& d : state.dislodged) {
    if (!reported.count(d.unit)) {
      UnitOrder def{d.unit, ActionType::DISBAND};
      out.outcomes.emplace_back(def, fate.count(d.unit) && fate[d.unit] != OrderOutcome::INVALID
                                         ? fate[d.unit]
                                         : OrderOutcome::SUCCESS);
    }
  }
  return out;
}

namespace {

// Distance from a unit to the nearest home center its power owns; used for
// the auto-disband ordering.
int home_distance(const MapGraph& graph, const GameState& state, const Unit& u) {
  int best = 1000;
  for (const auto& hc : graph.home_centers(u.power)) {
    auto path = graph.shortest_path(u.kind, u.location, hc);
    if (path) best = std::min(best, static_cast<int>(path->size()) - 1);
  }
  return best;
}

}  // namespace

PhaseResolution resolve_adjustments(const MapGraph& graph, const GameState& state,
                                    const OrdersByPower& orders) {
  if (state.phase_kind != PhaseKind::ADJUSTMENT)
    throw DipError(ErrorCode::PreconditionViolated, "not an adjustment phase");

  PhaseResolution out;
  GameState next = state;
  for (Power p : kAllPowers) {
    int delta = state.sc_count(p) - state.unit_count(p);
    std::vector<UnitOrder> subs;
    auto it = orders.find(p);
    if (it != orders.end()) subs = it->second;

    int builds_left = std::max(0, delta);
    int disbands_needed = std::max(0, -delta);
    std::set<Unit> disbanded;
    std::set<std::string> built;
    for (const auto& o : subs) {
      if (o.unit.power != p && o.type != ActionType::WAIVE) {
        out.outcomes.emplace_back(o, OrderOutcome::INVALID);
        continue;
      }
      if (o.type == ActionType::BUILD) {
        bool legal = builds_left > 0 && order_is_valid(graph, next, o) &&
                     !built.count(o.unit.location.province);
        if (legal) {
          next.units.push_back(o.unit);
          next.sort_units();
          built.insert(o.unit.location.province);
          --builds_left;
          out.outcomes.emplace_back(o, OrderOutcome::SUCCESS);
        } else {
          out.outcomes.emplace_back(o, OrderOutcome::INVALID);
        }
      } else if (o.type == ActionType::DISBAND) {
        bool legal = disbands_needed > 0 && !disbanded.count(o.unit) &&
                     order_is_valid(graph, state, o);
        if (legal) {
          disbanded.insert(o.unit);
          --disbands_needed;
          std::erase(next.units, o.unit);
          out.outcomes.emplace_back(o, OrderOutcome::SUCCESS);
        } else {
          out.outcomes.emplace_back(o, OrderOutcome::INVALID);
        }
      } else if (o.type == ActionType::WAIVE) {
        out.outcomes.emplace_back(o, OrderOutcome::SUCCESS);
      } else {
        out.outcomes.emplace_back(o, OrderOutcome::INVALID);
      }
    }
    // Auto-disband: farthest from home, fleets before armies, lexicographic.
    if (disbands_needed > 0) {
      std::vector<Unit> candidates;
      for (const auto& u : next.units)
        if (u.power == p) candidates.push_back(u);
      std::stable_sort(candidates.begin(), candidates.end(),
                       [&](const Unit& a, const Unit& b) {
                         int da = home_distance(graph, state, a);
                         int db = home_distance(graph, state, b);
                         if (da != db) return da > db;
                         if (a.kind != b.kind) return a.kind == UnitKind::FLEET;
                         return a.location < b.location;
                       });
      for (int k = 0; k < disbands_needed && k < static_cast<int>(candidates.size()); ++k) {
        UnitOrder d{candidates[k], ActionType::DISBAND};
        std::erase(next.units, candidates[k]);
        out.outcomes.emplace_back(d, OrderOutcome::SUCCESS);
      }
    }
  }
  next.sort_units();
  out.next_state = next;
  return out;
}

PhaseResolution resolve_phase(const MapGraph& graph, const GameState& state,
                              const OrdersByPower& orders) {
  switch (state.phase_kind) {
    case PhaseKind::MOVEMENT: return resolve_movement(graph, state, orders);
    case PhaseKind::RETREAT: return resolve_retreats(graph, state, orders);
    case PhaseKind::ADJUSTMENT: return resolve_adjustments(graph, state, orders);
  }
  throw DipError(ErrorCode::PreconditionViolated, "bad phase kind");
}

GameState advance_phase(const MapGraph& graph, const GameState& state,
                        const PhaseResolution& resolution) {
  const GameState& r = resolution.next_state;
  if (r.year != state.year || r.season != state.season ||
      r.phase_kind != state.phase_kind)
    throw DipError(ErrorCode::PreconditionViolated,
                   "resolution does not match state phase");
  GameState next = r;

  auto update_ownership_and_winner = [&](GameState& s) {
    for (const auto& u : s.units) {
      const Province& p = graph.province(u.location.province);
      if (p.is_supply_center) s.sc_ownership[p.id] = u.power;
    }
    for (Power pw : kAllPowers) {
      if (s.sc_count(pw) >= kVictoryCenters) s.winner = pw;
    }
  };
  auto any_adjustment_needed = [&](const GameState& s) {
    for (Power pw : kAllPowers) {
      int delta = s.sc_count(pw) - s.unit_count(pw);
      if (delta < 0) return true;
      if (delta > 0) {
        // A surplus only matters when a build is actually possible.
        for (const auto& hc : graph.home_centers(pw)) {
          auto it = s.sc_ownership.find(hc);
          if (it != s.sc_ownership.end() && it->second == pw && !s.unit_in(hc))
            return true;
        }
      }
    }
    return false;
  };

  if (state.phase_kind == PhaseKind::MOVEMENT) {
    if (!next.dislodged.empty()) {
      next.phase_kind = PhaseKind::RETREAT;
      return next;
    }
    if (state.season == Season::SPRING) {
      next.season = Season::FALL;
      next.phase_kind = PhaseKind::MOVEMENT;
      return next;
    }
    // End of FALL movement with no retreats: year end.
    update_ownership_and_winner(next);
    if (!next.winner && any_adjustment_needed(next)) {
      next.season = Season::WINTER;
      next.phase_kind = PhaseKind::ADJUSTMENT;
      return next;
    }
    next.season = Season::SPRING;
    next.phase_kind = PhaseKind::MOVEMENT;
    next.year += 1;
    return next;
  }
  if (state.phase_kind == PhaseKind::RETREAT) {
    if (state.season == Season::SPRING) {
      next.season = Season::FALL;
      next.phase_kind = PhaseKind::MOVEMENT;
      return next;
    }
    update_ownership_and_winner(next);
    if (!next.winner && any_adjustment_needed(next)) {
      next.season = Season::WINTER;
      next.phase_kind = PhaseKind::ADJUSTMENT;
      return next;
    }
    next.season = Season::SPRING;
    next.phase_kind = PhaseKind::MOVEMENT;
    next.year += 1;
    return next;
  }
  // Winter adjustments complete: next year.
  next.season = Season::SPRING;
  next.phase_kind = PhaseKind::MOVEMENT;
  next.year += 1;
  return next;
}

}  // namespace diplomacy
