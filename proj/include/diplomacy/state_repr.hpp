#pragma once

#include <map>
#include <string>
#include <vector>

#include "diplomacy/agent_state.hpp"
#include "diplomacy/map.hpp"
#include "diplomacy/state.hpp"

namespace diplomacy {

enum class PromptVariant { BASELINE, V1, V2, V3 };
enum class PressMode { FULL, NONE };

struct PromptConfig {
  PromptVariant variant = PromptVariant::BASELINE;
  bool possible_moves_summary = false;     // condensed legal-move recap section
  bool support_explanation_12shot = false; // 12 worked support-order examples
  bool omit_order_history = false;
  PressMode press = PressMode::FULL;
  int order_history_window = 3;  // movement phases shown
  int max_year = 1925;
};

struct RenderedPrompt {
  std::string system;
  std::string user;
  // Named section -> whether it appears in `user`.
  std::map<std::string, bool> section_index;
};

// One phase of the public order log, as shown under "# Order History".
struct OrderLogEntry {
  Power power = Power::AUSTRIA;
  std::string order;    // canonical notation
  std::string outcome;  // SUCCESS / BOUNCE / ...
};
struct PhaseOrderRecord {
  std::string phase;
  std::vector<OrderLogEntry> orders;
};

// Raw template file from data/templates/<name>.txt (cached after first read).
const std::string& template_text(const std::string& name);

// Replaces each "{key}" with its value; unknown placeholders are left intact.
std::string substitute(const std::string& tmpl,
                       const std::map<std::string, std::string>& vars);

std::string render_system_prompt(Power power, PromptVariant variant);

// Fig.-2-style enriched unit block. Throws PreconditionViolated when the unit
// is not `power`'s or absent from the state.
std::string render_unit_block(const MapGraph& graph, const GameState& state,
                              Power power, const Unit& unit);

// "<Territory XXX>" strategic-overview block with possible movements and
// "Available Support:" lines for units (any power) adjacent to each target.
std::string render_territory_block(const MapGraph& graph, const GameState& state,
                                   Power power, const Unit& unit);

RenderedPrompt render_order_prompt(const PromptConfig& config,
                                   const MapGraph& graph, const GameState& state,
                                   const AgentState& agent,
                                   const std::vector<Message>& messages_this_round,
                                   const std::vector<PhaseOrderRecord>& history);

RenderedPrompt render_negotiation_prompt(const PromptConfig& config,
                                         const MapGraph& graph,
                                         const GameState& state,
                                         const AgentState& agent,
                                         const std::vector<Message>& inbox,
                                         const std::vector<PhaseOrderRecord>& history);

RenderedPrompt render_diary_prompt(const GameState& state, const AgentState& agent,
                                   const std::vector<Message>& round_messages);

}  // namespace diplomacy
