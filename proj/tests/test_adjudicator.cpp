#include <doctest.h>

#include "diplomacy/adjudicator.hpp"

using namespace diplomacy;

static const MapGraph& standard_map() {
  static MapGraph g = MapGraph::load_file(std::string(DIPLOMACY_DATA_DIR) +
                                          "/standard_map.txt");
  return g;
}

namespace {

GameState board(std::vector<std::pair<Power, const char*>> units,
                Season season = Season::SPRING,
                PhaseKind kind = PhaseKind::MOVEMENT) {
  GameState s;
  s.year = 1901;
  s.started_year = 1901;
  s.season = season;
  s.phase_kind = kind;
  for (const auto& [p, spec] : units) {
    std::string t = spec;
    UnitKind k = t[0] == 'F' ? UnitKind::FLEET : UnitKind::ARMY;
    s.units.push_back(Unit{p, k, Location::parse(t.substr(2))});
  }
  s.sort_units();
  return s;
}

OrdersByPower submit(const GameState& s,
                     std::vector<std::pair<Power, const char*>> orders) {
  OrdersByPower out;
  for (const auto& [p, text] : orders)
    out[p].push_back(parse_order(text, p, s, standard_map()));
  return out;
}

OrderOutcome outcome_of(const PhaseResolution& r, const std::string& rendered) {
  for (const auto& [o, oc] : r.outcomes)
    if (render_order(o) == rendered) return oc;
  FAIL("no outcome for ", rendered);
  return OrderOutcome::INVALID;
}

bool unit_at(const GameState& s, Power p, const char* loc) {
  for (const auto& u : s.units)
    if (u.power == p && u.location.str() == loc) return true;
  return false;
}

}  // namespace

TEST_CASE("unsupported attack on an occupied province bounces") {
  GameState s = board({{Power::FRANCE, "A PAR"}, {Power::GERMANY, "A BUR"}});
  auto r = resolve_movement(standard_map(), s,
                            submit(s, {{Power::FRANCE, "A PAR - BUR"},
                                       {Power::GERMANY, "A BUR H"}}));
  CHECK(outcome_of(r, "A PAR - BUR") == OrderOutcome::BOUNCE);
  CHECK(unit_at(r.next_state, Power::GERMANY, "BUR"));
}

TEST_CASE("supported attack dislodges") {
  GameState s = board({{Power::FRANCE, "A PAR"},
                       {Power::FRANCE, "A PIC"},
                       {Power::GERMANY, "A BUR"}});
  auto r = resolve_movement(standard_map(), s,
                            submit(s, {{Power::FRANCE, "A PAR - BUR"},
                                       {Power::FRANCE, "A PIC S A PAR - BUR"},
                                       {Power::GERMANY, "A BUR H"}}));
  CHECK(outcome_of(r, "A PAR - BUR") == OrderOutcome::SUCCESS);
  CHECK(outcome_of(r, "A BUR H") == OrderOutcome::DISLODGED);
  REQUIRE(r.next_state.dislodged.size() == 1);
  CHECK(r.next_state.dislodged[0].unit.power == Power::GERMANY);
  CHECK(r.next_state.dislodged[0].forbidden.count("PAR") == 1);
}

TEST_CASE("support is cut by an attack from a third province") {
  GameState s = board({{Power::FRANCE, "A PAR"},
                       {Power::FRANCE, "A PIC"},
                       {Power::GERMANY, "A BUR"},
                       {Power::GERMANY, "A BEL"}});
  auto r = resolve_movement(standard_map(), s,
                            submit(s, {{Power::FRANCE, "A PAR - BUR"},
                                       {Power::FRANCE, "A PIC S A PAR - BUR"},
                                       {Power::GERMANY, "A BEL - PIC"},
                                       {Power::GERMANY, "A BUR H"}}));
  CHECK(outcome_of(r, "A PIC S A PAR - BUR") == OrderOutcome::CUT);
  CHECK(outcome_of(r, "A PAR - BUR") == OrderOutcome::BOUNCE);
  CHECK(unit_at(r.next_state, Power::GERMANY, "BUR"));
}

TEST_CASE("support is not cut by an attack from the destination") {
  // The unit being attacked out of cannot cut the support directed at it.
  GameState s = board({{Power::FRANCE, "A PAR"},
                       {Power::FRANCE, "A MAR"},
                       {Power::GERMANY, "A BUR"}});
  auto r = resolve_movement(standard_map(), s,
                            submit(s, {{Power::FRANCE, "A MAR - BUR"},
                                       {Power::FRANCE, "A PAR S A MAR - BUR"},
                                       {Power::GERMANY, "A BUR - PAR"}}));
  CHECK(outcome_of(r, "A PAR S A MAR - BUR") == OrderOutcome::SUCCESS);
  CHECK(outcome_of(r, "A MAR - BUR") == OrderOutcome::SUCCESS);
  CHECK(outcome_of(r, "A BUR - PAR") == OrderOutcome::DISLODGED);
}

TEST_CASE("a power cannot dislodge its own unit") {
  GameState s = board({{Power::GERMANY, "A BER"},
                       {Power::GERMANY, "A SIL"},
                       {Power::GERMANY, "A PRU"}});
  auto r = resolve_movement(standard_map(), s,
                            submit(s, {{Power::GERMANY, "A SIL - BER"},
                                       {Power::GERMANY, "A PRU S A SIL - BER"},
                                       {Power::GERMANY, "A BER H"}}));
  CHECK(outcome_of(r, "A SIL - BER") == OrderOutcome::BOUNCE);
  CHECK(unit_at(r.next_state, Power::GERMANY, "BER"));
}

TEST_CASE("head to head battles resolve by strength") {
  GameState s = board({{Power::FRANCE, "A BUR"},
                       {Power::FRANCE, "A GAS"},
                       {Power::GERMANY, "A MAR"}});
  auto r = resolve_movement(standard_map(), s,
                            submit(s, {{Power::FRANCE, "A BUR - MAR"},
                                       {Power::FRANCE, "A GAS S A BUR - MAR"},
                                       {Power::GERMANY, "A MAR - BUR"}}));
  CHECK(outcome_of(r, "A BUR - MAR") == OrderOutcome::SUCCESS);
  CHECK(outcome_of(r, "A MAR - BUR") == OrderOutcome::DISLODGED);
  // Dislodged in a head-to-head: cannot retreat to the attacker's origin.
  CHECK(r.next_state.dislodged[0].forbidden.count("BUR") == 1);
}

TEST_CASE("three-way rotation succeeds (circular movement)") {
  GameState s = board({{Power::AUSTRIA, "A VIE"},
                       {Power::AUSTRIA, "A BUD"},
                       {Power::AUSTRIA, "A GAL"}});
  auto r = resolve_movement(standard_map(), s,
                            submit(s, {{Power::AUSTRIA, "A VIE - BUD"},
                                       {Power::AUSTRIA, "A BUD - GAL"},
                                       {Power::AUSTRIA, "A GAL - VIE"}}));
  CHECK(outcome_of(r, "A VIE - BUD") == OrderOutcome::SUCCESS);
  CHECK(outcome_of(r, "A BUD - GAL") == OrderOutcome::SUCCESS);
  CHECK(outcome_of(r, "A GAL - VIE") == OrderOutcome::SUCCESS);
}

TEST_CASE("two units swapping without convoy both bounce") {
  GameState s = board({{Power::FRANCE, "A PAR"}, {Power::GERMANY, "A BUR"}});
  auto r = resolve_movement(standard_map(), s,
                            submit(s, {{Power::FRANCE, "A PAR - BUR"},
                                       {Power::GERMANY, "A BUR - PAR"}}));
  CHECK(outcome_of(r, "A PAR - BUR") == OrderOutcome::BOUNCE);
  CHECK(outcome_of(r, "A BUR - PAR") == OrderOutcome::BOUNCE);
}

TEST_CASE("standoff leaves the contested province empty and forbidden") {
  GameState s = board({{Power::FRANCE, "A PAR"},
                       {Power::GERMANY, "A RUH"},
                       {Power::ITALY, "A MAR"}});
  auto r = resolve_movement(standard_map(), s,
                            submit(s, {{Power::FRANCE, "A PAR - BUR"},
                                       {Power::GERMANY, "A RUH - BUR"},
                                       {Power::ITALY, "A MAR - BUR"}}));
  // 1 vs 1 vs 1: nobody enters.
  CHECK(outcome_of(r, "A PAR - BUR") == OrderOutcome::BOUNCE);
  CHECK(outcome_of(r, "A RUH - BUR") == OrderOutcome::BOUNCE);
  CHECK(outcome_of(r, "A MAR - BUR") == OrderOutcome::BOUNCE);
  CHECK(r.next_state.unit_in("BUR") == nullptr);
}

TEST_CASE("convoyed attack succeeds and convoy disruption voids it") {
  GameState s = board({{Power::ENGLAND, "A LON"},
                       {Power::ENGLAND, "F NTH"},
                       {Power::GERMANY, "A HOL"}});
  SUBCASE("convoy intact") {
    auto r = resolve_movement(standard_map(), s,
                              submit(s, {{Power::ENGLAND, "A LON - NWY"},
                                         {Power::ENGLAND, "F NTH C A LON - NWY"},
                                         {Power::GERMANY, "A HOL H"}}));
    CHECK(outcome_of(r, "A LON - NWY") == OrderOutcome::SUCCESS);
    CHECK(outcome_of(r, "F NTH C A LON - NWY") == OrderOutcome::SUCCESS);
    CHECK(unit_at(r.next_state, Power::ENGLAND, "NWY"));
  }
  SUBCASE("convoying fleet dislodged: move fails") {
    GameState s2 = board({{Power::ENGLAND, "A LON"},
                          {Power::ENGLAND, "F NTH"},
                          {Power::GERMANY, "F SKA"},
                          {Power::GERMANY, "F HEL"},
                          {Power::GERMANY, "F DEN"}});
    auto r = resolve_movement(standard_map(), s2,
                              submit(s2, {{Power::ENGLAND, "A LON - NWY"},
                                          {Power::ENGLAND, "F NTH C A LON - NWY"},
                                          {Power::GERMANY, "F SKA - NTH"},
                                          {Power::GERMANY, "F HEL S F SKA - NTH"},
                                          {Power::GERMANY, "F DEN S F SKA - NTH"}}));
    CHECK(outcome_of(r, "F NTH C A LON - NWY") == OrderOutcome::DISLODGED);
    CHECK(outcome_of(r, "A LON - NWY") == OrderOutcome::BOUNCE);
    CHECK(unit_at(r.next_state, Power::ENGLAND, "LON"));
  }
}

TEST_CASE("convoy paradox falls to the Szykman rule") {
  // The convoyed army attacks a fleet supporting an attack on the convoy.
  GameState s = board({{Power::FRANCE, "A SPA"},
                       {Power::FRANCE, "F LYO"},
                       {Power::ITALY, "F MAR"},
                       {Power::ITALY, "F WES"}});
  auto r = resolve_movement(standard_map(), s,
                            submit(s, {{Power::FRANCE, "A SPA - MAR VIA"},
                                       {Power::FRANCE, "F LYO C A SPA - MAR"},
                                       {Power::ITALY, "F MAR S F WES - LYO"},
                                       {Power::ITALY, "F WES - LYO"}}));
  // Szykman: the convoyed move fails; the support stands; LYO is dislodged.
  CHECK(outcome_of(r, "A SPA - MAR VIA") == OrderOutcome::BOUNCE);
  CHECK(outcome_of(r, "F MAR S F WES - LYO") == OrderOutcome::SUCCESS);
  CHECK(outcome_of(r, "F WES - LYO") == OrderOutcome::SUCCESS);
  CHECK(outcome_of(r, "F LYO C A SPA - MAR") == OrderOutcome::DISLODGED);
}

TEST_CASE("invalid orders get INVALID and the unit holds") {
  GameState s = board({{Power::FRANCE, "A PAR"}});
  auto orders = submit(s, {{Power::FRANCE, "A PAR - MUN"}});  // not reachable
  auto r = resolve_movement(standard_map(), s, orders);
  CHECK(outcome_of(r, "A PAR - MUN") == OrderOutcome::INVALID);
  CHECK(outcome_of(r, "A PAR H") == OrderOutcome::SUCCESS);
  CHECK(unit_at(r.next_state, Power::FRANCE, "PAR"));
}

TEST_CASE("unordered units receive implicit holds") {
  GameState s = board({{Power::FRANCE, "A PAR"}, {Power::GERMANY, "A MUN"}});
  auto r = resolve_movement(standard_map(), s, {});
  CHECK(r.outcomes.size() == 2);
  CHECK(outcome_of(r, "A PAR H") == OrderOutcome::SUCCESS);
  CHECK(outcome_of(r, "A MUN H") == OrderOutcome::SUCCESS);
}

TEST_CASE("retreat collisions disband both units") {
  GameState s = board({}, Season::SPRING, PhaseKind::RETREAT);
  Unit a{Power::FRANCE, UnitKind::ARMY, Location::parse("PAR")};
  Unit b{Power::GERMANY, UnitKind::ARMY, Location::parse("BUR")};
  s.dislodged.push_back(DislodgedUnit{a, {}});
  s.dislodged.push_back(DislodgedUnit{b, {}});
  auto orders = submit(s, {{Power::FRANCE, "A PAR R PIC"},
                           {Power::GERMANY, "A BUR R BEL"}});
  // Different destinations: both survive.
  auto r1 = resolve_retreats(standard_map(), s, orders);
  CHECK(r1.next_state.units.size() == 2);
  // Same destination (GAS reachable from neither baseline; use PIC vs PIC):
  auto clash = submit(s, {{Power::FRANCE, "A PAR R PIC"},
                          {Power::GERMANY, "A BUR R PIC"}});
  auto r2 = resolve_retreats(standard_map(), s, clash);
  CHECK(r2.next_state.units.empty());
  CHECK(outcome_of(r2, "A PAR R PIC") == OrderOutcome::BOUNCE);
  CHECK(outcome_of(r2, "A BUR R PIC") == OrderOutcome::BOUNCE);
}

TEST_CASE("unordered dislodged units disband") {
  GameState s = board({}, Season::SPRING, PhaseKind::RETREAT);
  s.dislodged.push_back(
      DislodgedUnit{Unit{Power::ITALY, UnitKind::ARMY, Location::parse("VEN")}, {}});
  auto r = resolve_retreats(standard_map(), s, {});
  CHECK(r.next_state.units.empty());
  CHECK(r.next_state.dislodged.empty());
  CHECK(outcome_of(r, "A VEN D") == OrderOutcome::SUCCESS);
}

TEST_CASE("adjustments: builds, waives, and auto-disbands") {
  const MapGraph& g = standard_map();
  GameState s = board({{Power::FRANCE, "A PAR"}}, Season::WINTER,
                      PhaseKind::ADJUSTMENT);
  s.sc_ownership["PAR"] = Power::FRANCE;
  s.sc_ownership["BRE"] = Power::FRANCE;
  s.sc_ownership["MAR"] = Power::FRANCE;

  SUBCASE("build in an owned empty home center") {
    auto r = resolve_adjustments(g, s, submit(s, {{Power::FRANCE, "F BRE B"}}));
    CHECK(outcome_of(r, "F BRE B") == OrderOutcome::SUCCESS);
    CHECK(unit_at(r.next_state, Power::FRANCE, "BRE"));
  }
  SUBCASE("build in an occupied center is invalid") {
    auto r = resolve_adjustments(g, s, submit(s, {{Power::FRANCE, "A PAR B"}}));
    CHECK(outcome_of(r, "A PAR B") == OrderOutcome::INVALID);
  }
  SUBCASE("builds beyond the surplus are refused") {
    OrdersByPower orders;
    orders[Power::FRANCE] = {parse_order("F BRE B", Power::FRANCE, s, g),
                             parse_order("A MAR B", Power::FRANCE, s, g),
                             parse_order("A PAR B", Power::FRANCE, s, g)};
    auto r = resolve_adjustments(g, s, orders);
    CHECK(outcome_of(r, "F BRE B") == OrderOutcome::SUCCESS);
    CHECK(outcome_of(r, "A MAR B") == OrderOutcome::SUCCESS);
    CHECK(outcome_of(r, "A PAR B") == OrderOutcome::INVALID);  // occupied anyway
    CHECK(r.next_state.unit_count(Power::FRANCE) == 3);
  }
  SUBCASE("waive consumes nothing and succeeds") {
    auto r = resolve_adjustments(g, s, submit(s, {{Power::FRANCE, "WAIVE"}}));
    CHECK(outcome_of(r, "WAIVE") == OrderOutcome::SUCCESS);
    CHECK(r.next_state.unit_count(Power::FRANCE) == 1);
  }
}

TEST_CASE("auto-disband removes the farthest unit, fleets first") {
  const MapGraph& g = standard_map();
  GameState s = board({{Power::FRANCE, "A PAR"},
                       {Power::FRANCE, "F NTH"},
                       {Power::FRANCE, "A PIC"}},
                      Season::WINTER, PhaseKind::ADJUSTMENT);
  s.sc_ownership["PAR"] = Power::FRANCE;
  s.sc_ownership["BRE"] = Power::FRANCE;
  // 3 units, 2 centers: one auto-disband; the North Sea fleet is farthest.
  auto r = resolve_adjustments(g, s, {});
  CHECK(r.next_state.unit_count(Power::FRANCE) == 2);
  CHECK_FALSE(unit_at(r.next_state, Power::FRANCE, "NTH"));
  CHECK(outcome_of(r, "F NTH D") == OrderOutcome::SUCCESS);
}

TEST_CASE("phase sequencing through a year") {
  const MapGraph& g = standard_map();
  GameState s = GameState::opening(g);
  // Spring movement, nothing dislodged: straight to fall.
  auto r = resolve_movement(g, s, {});
  GameState fall = advance_phase(g, s, r);
  CHECK(fall.phase_code() == "F1901M");
  // Fall movement with no dislodgements and no builds possible (all home
  // centers occupied): next spring.
  auto r2 = resolve_movement(g, fall, {});
  GameState next = advance_phase(g, fall, r2);
  CHECK(next.phase_code() == "S1902M");
}

TEST_CASE("fall dislodgement inserts a retreat phase, then winter builds") {
  const MapGraph& g = standard_map();
  GameState s = board({{Power::FRANCE, "A BUR"},
                       {Power::FRANCE, "A PIC"},
                       {Power::GERMANY, "A PAR"}},
                      Season::FALL);
  s.sc_ownership["PAR"] = Power::GERMANY;
  s.sc_ownership["BRE"] = Power::FRANCE;
  s.sc_ownership["MAR"] = Power::FRANCE;
  auto r = resolve_movement(g, s, submit(s, {{Power::FRANCE, "A BUR - PAR"},
                                             {Power::FRANCE, "A PIC S A BUR - PAR"},
                                             {Power::GERMANY, "A PAR H"}}));
  GameState retreat = advance_phase(g, s, r);
  CHECK(retreat.phase_code() == "F1901R");
  auto rr = resolve_retreats(g, retreat, {});
  GameState winter = advance_phase(g, retreat, rr);
  // Paris changes hands at year end; France may build in BRE.
  CHECK(winter.phase_code() == "W1901A");
  CHECK(winter.sc_ownership.at("PAR") == Power::FRANCE);
  auto ra = resolve_adjustments(g, winter, {});
  GameState spring = advance_phase(g, winter, ra);
  CHECK(spring.phase_code() == "S1902M");
}

TEST_CASE("winner is flagged at 18 centers") {
  const MapGraph& g = standard_map();
  GameState s = board({{Power::FRANCE, "A PAR"}}, Season::FALL);
  const char* centers[] = {"PAR", "BRE", "MAR", "SPA", "POR", "BEL", "HOL",
                           "LON", "LVP", "EDI", "MUN", "BER", "KIE", "VEN",
                           "ROM", "NAP", "TUN", "DEN"};
  for (const char* c : centers) s.sc_ownership[c] = Power::FRANCE;
  auto r = resolve_movement(g, s, {});
  GameState next = advance_phase(g, s, r);
  REQUIRE(next.winner.has_value());
  CHECK(*next.winner == Power::FRANCE);
}
