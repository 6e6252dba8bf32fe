#pragma once

#include <map>
#include <string>
#include <vector>

#include "diplomacy/core.hpp"
#include "diplomacy/map.hpp"
#include "diplomacy/state.hpp"

namespace diplomacy {

enum class ActionType {
  HOLD,
  MOVE,
  SUPPORT_HOLD,
  SUPPORT_MOVE,
  CONVOY,
  RETREAT,
  DISBAND,
  BUILD,
  WAIVE,
};

struct UnitOrder {
  Unit unit;
  ActionType type = ActionType::HOLD;
  Location target;              // MOVE / RETREAT destination
  UnitKind aux_kind = UnitKind::ARMY;  // supported / convoyed unit
  Location aux_from;            // SUPPORT_* / CONVOY subject location
  Location aux_to;              // SUPPORT_MOVE / CONVOY destination
  bool via_convoy = false;      // MOVE only

  auto operator<=>(const UnitOrder&) const = default;
};

enum class OrderOutcome { SUCCESS, BOUNCE, CUT, DISLODGED, VOID, INVALID };

const char* order_outcome_name(OrderOutcome o);

// Parses the canonical notation, case-insensitively, binding the order to one
// of `power`'s units (for builds: to a prospective unit). Throws DipError with
// UnknownProvince / NotYourUnit / MalformedSyntax / IllegalCoast.
UnitOrder parse_order(const std::string& text, Power power,
                      const GameState& state, const MapGraph& graph);

// Canonical uppercase notation; parse_order(render_order(o)) == o.
std::string render_order(const UnitOrder& order);

// All legal orders per unit for the current phase. Supports are listed for the
// power's own units only; cross-power supports remain parseable elsewhere.
std::map<Unit, std::vector<UnitOrder>> enumerate_possible_orders(
    const MapGraph& graph, const GameState& state, Power power);

// Structural + adjacency legality for the state's current phase; outcome
// questions (bounces, cuts, budgets) are the adjudicator's business.
bool order_is_valid(const MapGraph& graph, const GameState& state,
                    const UnitOrder& order);

// Province-level "may lend support into" test; fleets on a split coast are
// judged from any coast of their province (DATC 6.B.5 convention).
bool can_support_into(const MapGraph& graph, const Unit& unit,
                      const std::string& province);

// A chain of water provinces occupied by fleets (any power) connects the two
// coastal provinces; the precondition for an army move to be read as a convoy.
bool convoy_chain_possible(const MapGraph& graph, const GameState& state,
                           const std::string& from_province,
                           const std::string& to_province);

}  // namespace diplomacy
