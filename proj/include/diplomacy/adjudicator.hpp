#pragma once

#include <map>
#include <utility>
#include <vector>

#include "diplomacy/map.hpp"
#include "diplomacy/orders.hpp"
#include "diplomacy/state.hpp"

namespace diplomacy {

struct PhaseResolution {
  // Every submitted order receives exactly one outcome, in canonical power
  // order and submission order within a power. Implicit defaults (holds for
  // unordered units, auto-disbands) are appended and adjudicated like any
  // other order.
  std::vector<std::pair<UnitOrder, OrderOutcome>> outcomes;
  // State after applying this phase's effects; phase clock not yet advanced.
  GameState next_state;
};

using OrdersByPower = std::map<Power, std::vector<UnitOrder>>;

// Simultaneous DATC-style resolution with support strength, support cutting,
// convoy handling (Szykman rule for paradoxes) and dislodgement. Illegal
// orders receive outcome INVALID and the unit holds.
PhaseResolution resolve_movement(const MapGraph& graph, const GameState& state,
                                 const OrdersByPower& orders);

// Dislodged units retreat to adjacent, empty, non-forbidden provinces;
// colliding retreats disband both; unordered dislodged units disband.
PhaseResolution resolve_retreats(const MapGraph& graph, const GameState& state,
                                 const OrdersByPower& orders);

// Builds in owned empty home centers, disbands, auto-disbands for unmet
// deficits (farthest from home, fleets first, then lexicographic).
PhaseResolution resolve_adjustments(const MapGraph& graph,
                                    const GameState& state,
                                    const OrdersByPower& orders);

/// Advances the phase clock: SPRING M -> [SPRING R] -> FALL M -> [FALL R] ->
// [WINTER A] -> next SPRING. Updates supply-center ownership at year end and
// flags a winner at >= 18 centers.
GameState advance_phase(const MapGraph& graph, const GameState& state,
                        const PhaseResolution& resolution);

// Dispatches to the resolver matching state.phase_kind.
PhaseResolution resolve_phase(const MapGraph& graph, const GameState& state,
                              const OrdersByPower& orders);

inline constexpr int kVictoryCenters = 18;

}  // namespace diplomacy
