#include <doctest.h>

#include "diplomacy/orders.hpp"

using namespace diplomacy;

static const MapGraph& standard_map() {
  static MapGraph g = MapGraph::load_file(std::string(DIPLOMACY_DATA_DIR) +
                                          "/standard_map.txt");
  return g;
}

static GameState opening() { return GameState::opening(standard_map()); }

TEST_CASE("parse and render round trip") {
  GameState s = opening();
  const MapGraph& g = standard_map();
  for (const char* text : {"A PAR - PIC", "F BRE - MAO", "A MAR H",
                           "A PAR S A MAR", "A PAR S F BRE - PIC"}) {
    UnitOrder o = parse_order(text, Power::FRANCE, s, g);
    CHECK(render_order(o) == text);
    CHECK(parse_order(render_order(o), Power::FRANCE, s, g) == o);
  }
}

TEST_CASE("parser is case and spacing insensitive") {
  GameState s = opening();
  const MapGraph& g = standard_map();
  UnitOrder a = parse_order("a par-pic", Power::FRANCE, s, g);
  UnitOrder b = parse_order("A PAR - PIC", Power::FRANCE, s, g);
  CHECK(a == b);
  CHECK(parse_order("f bre move mao", Power::FRANCE, s, g).type == ActionType::MOVE);
  CHECK(parse_order("A PAR HOLDS", Power::FRANCE, s, g).type == ActionType::HOLD);
}

TEST_CASE("province aliases are canonicalized") {
  GameState s = opening();
  const MapGraph& g = standard_map();
  UnitOrder o = parse_order("F BRE - MID", Power::FRANCE, s, g);
  CHECK(o.target.province == "MAO");
}

TEST_CASE("unknown provinces and wrong owners are rejected with codes") {
  GameState s = opening();
  const MapGraph& g = standard_map();
  try {
    parse_order("A QQQ - PAR", Power::FRANCE, s, g);
    FAIL("expected");
  } catch (const DipError& e) {
    CHECK(e.code() == ErrorCode::UnknownProvince);
  }
  try {
    parse_order("A MUN - BUR", Power::FRANCE, s, g);
    FAIL("expected");
  } catch (const DipError& e) {
    CHECK(e.code() == ErrorCode::NotYourUnit);
  }
  try {
    parse_order("A PAR X PIC", Power::FRANCE, s, g);
    FAIL("expected");
  } catch (const DipError& e) {
    CHECK(e.code() == ErrorCode::MalformedSyntax);
  }
}

TEST_CASE("dual-coast destinations resolve when unambiguous") {
  const MapGraph& g = standard_map();
  GameState s = opening();
  // A fleet at RUM can only reach BUL's east coast: auto-qualify.
  s.units.push_back(Unit{Power::RUSSIA, UnitKind::FLEET, Location::parse("RUM")});
  s.sort_units();
  UnitOrder o = parse_order("F RUM - BUL", Power::RUSSIA, s, g);
  CHECK(o.target.str() == "BUL/EC");
  CHECK(render_order(o) == "F RUM - BUL/EC");

  // A fleet in MAO can reach both coasts of SPA: ambiguous.
  GameState s2 = s;
  s2.units.push_back(Unit{Power::FRANCE, UnitKind::FLEET, Location::parse("MAO")});
  s2.sort_units();
  try {
    parse_order("F MAO - SPA", Power::FRANCE, s2, g);
    FAIL("expected");
  } catch (const DipError& e) {
    CHECK(e.code() == ErrorCode::IllegalCoast);
  }
  UnitOrder ok = parse_order("F MAO - SPA/NC", Power::FRANCE, s2, g);
  CHECK(ok.target.str() == "SPA/NC");
}

TEST_CASE("supports are coast-insensitive and adopt the board unit") {
  const MapGraph& g = standard_map();
  GameState s = opening();
  // A MOS supports the fleet at SEV: kind inferred from the board.
  UnitOrder o = parse_order("A MOS S SEV", Power::RUSSIA, s, g);
  CHECK(o.type == ActionType::SUPPORT_HOLD);
  CHECK(o.aux_kind == UnitKind::FLEET);
  CHECK(render_order(o) == "A MOS S F SEV");
}

TEST_CASE("convoy orders parse to province-level endpoints") {
  const MapGraph& g = standard_map();
  GameState s = opening();
  s.units.push_back(Unit{Power::ENGLAND, UnitKind::FLEET, Location::parse("NTH")});
  s.units.push_back(Unit{Power::ENGLAND, UnitKind::ARMY, Location::parse("YOR")});
  s.sort_units();
  UnitOrder c = parse_order("F NTH C A YOR - NWY", Power::ENGLAND, s, g);
  CHECK(c.type == ActionType::CONVOY);
  CHECK(render_order(c) == "F NTH C A YOR - NWY");
  UnitOrder m = parse_order("A YOR - NWY VIA CONVOY", Power::ENGLAND, s, g);
  CHECK(m.via_convoy);
  CHECK(render_order(m) == "A YOR - NWY VIA");
}

TEST_CASE("order validity: moves") {
  const MapGraph& g = standard_map();
  GameState s = opening();
  auto valid = [&](const char* t, Power p) {
    return order_is_valid(g, s, parse_order(t, p, s, g));
  };
  CHECK(valid("A PAR - BUR", Power::FRANCE));
  CHECK_FALSE(valid("A PAR - MUN", Power::FRANCE));  // not adjacent, no convoy
  CHECK(valid("F BRE - MAO", Power::FRANCE));
  CHECK_FALSE(valid("F BRE - PAR", Power::FRANCE));  // fleets cannot go inland
  CHECK_FALSE(valid("A MAR - LYO", Power::FRANCE));  // armies cannot enter water
}

TEST_CASE("army moves over a convoy chain are valid") {
  const MapGraph& g = standard_map();
  GameState s = opening();
  s.units.push_back(Unit{Power::ENGLAND, UnitKind::FLEET, Location::parse("NTH")});
  s.units.push_back(Unit{Power::ENGLAND, UnitKind::ARMY, Location::parse("YOR")});
  s.sort_units();
  UnitOrder m = parse_order("A YOR - NWY", Power::ENGLAND, s, g);
  CHECK(order_is_valid(g, s, m));
  CHECK(convoy_chain_possible(g, s, "YOR", "NWY"));
  CHECK_FALSE(convoy_chain_possible(g, s, "YOR", "BRE"));
}

TEST_CASE("build orders validate against owned empty home centers") {
  const MapGraph& g = standard_map();
  GameState s = opening();
  s.phase_kind = PhaseKind::ADJUSTMENT;
  s.season = Season::WINTER;
  // PAR occupied at the opening: no build.
  CHECK_FALSE(order_is_valid(g, s, parse_order("A PAR B", Power::FRANCE, s, g)));
  std::erase_if(s.units, [](const Unit& u) { return u.location.province == "PAR"; });
  CHECK(order_is_valid(g, s, parse_order("A PAR B", Power::FRANCE, s, g)));
  CHECK_FALSE(order_is_valid(g, s, parse_order("F PAR B", Power::FRANCE, s, g)));
  // STP builds name an explicit coast for fleets.
  std::erase_if(s.units, [](const Unit& u) { return u.location.province == "STP"; });
  CHECK(order_is_valid(g, s, parse_order("F STP/NC B", Power::RUSSIA, s, g)));
  CHECK(render_order(parse_order("F STP/NC B", Power::RUSSIA, s, g)) == "F STP/NC B");
  // Not France's home center.
  CHECK_FALSE(order_is_valid(g, s, parse_order("A STP B", Power::FRANCE, s, g)));
}

TEST_CASE("enumerate_possible_orders at the opening for France") {
  const MapGraph& g = standard_map();
  GameState s = opening();
  auto all = enumerate_possible_orders(g, s, Power::FRANCE);
  CHECK(all.size() == 3);
  Unit par{Power::FRANCE, UnitKind::ARMY, Location::parse("PAR")};
  REQUIRE(all.count(par));
  const auto& list = all.at(par);
  // Every enumerated order is valid; hold is present; moves match adjacency.
  bool has_hold = false;
  int moves = 0;
  for (const auto& o : list) {
    CHECK(order_is_valid(g, s, o));
    if (o.type == ActionType::HOLD) has_hold = true;
    if (o.type == ActionType::MOVE) ++moves;
  }
  CHECK(has_hold);
  CHECK(moves == 4);  // BRE, BUR, GAS, PIC
}

TEST_CASE("enumerate retreat options excludes occupied and forbidden") {
  const MapGraph& g = standard_map();
  GameState s = opening();
  s.phase_kind = PhaseKind::RETREAT;
  Unit mun{Power::GERMANY, UnitKind::ARMY, Location::parse("MUN")};
  std::erase(s.units, mun);
  s.dislodged.push_back(DislodgedUnit{mun, {"BOH", "TYR"}});
  auto all = enumerate_possible_orders(g, s, Power::GERMANY);
  REQUIRE(all.count(mun));
  bool has_disband = false;
  for (const auto& o : all.at(mun)) {
    if (o.type == ActionType::DISBAND) has_disband = true;
    if (o.type == ActionType::RETREAT) {
      CHECK(o.target.province != "BOH");
      CHECK(o.target.province != "TYR");
      CHECK(o.target.province != "BER");  // occupied
      CHECK(o.target.province != "KIE");  // occupied
    }
  }
  CHECK(has_disband);
}
