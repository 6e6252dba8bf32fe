#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "diplomacy/adjudicator.hpp"

namespace diplomacy {

// One order line of a conformance case: who submits it, the literal text, and
// the outcome the adjudicator must report for it.
struct DatcExpectation {
  Power power = Power::AUSTRIA;
  std::string order_text;
  std::string expected;  // SUCCESS / BOUNCE / CUT / DISLODGED / VOID / INVALID
};

struct DatcCase {
  std::string id;     // "6.A.1"
  std::string title;  // prose after the id
  std::string phase = "S1901M";
  std::vector<std::pair<Power, std::string>> extra_units;  // "F LON"
  std::vector<std::pair<Power, std::string>> ownership;    // province id
  std::vector<DatcExpectation> orders;
  std::vector<std::string> expect_dislodged;  // "F TRI"
};

struct DatcOrderResult {
  std::string order_text;
  std::string expected;
  std::string actual;
  bool ok = false;
};

struct DatcCaseResult {
  std::string id;
  std::string title;
  bool passed = false;
  std::vector<DatcOrderResult> orders;
  std::vector<std::string> notes;  // dislodgement mismatches, setup errors
};

struct DatcSummary {
  int total = 0;
  int passed = 0;
  // Section key ("6.A") -> {passed, total}.
  std::map<std::string, std::pair<int, int>> by_section;
  std::vector<DatcCaseResult> cases;
};

// Parses the structured-text corpus format:
//   CASE 6.A.1 Moving to an area that is not a neighbour
//   PHASE S1901M                      (optional; movement 1901 by default)
//   UNIT ENGLAND F LON                (a unit with no explicit order)
//   OWN FRANCE PAR                    (supply-center ownership, for builds)
//   ENGLAND: F NTH - PIC => INVALID
//   DISLODGED F TRI                   (must appear in the dislodged list)
//   END
std::vector<DatcCase> load_datc_file(const std::string& path);

DatcCaseResult run_datc_case(const MapGraph& graph, const DatcCase& c);
DatcSummary run_datc_file(const MapGraph& graph, const std::string& path);

// "6.A.12" -> "6.A"
std::string datc_section(const std::string& case_id);

}  // namespace diplomacy
