#include "diplomacy/state_repr.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>

#include "diplomacy/orders.hpp"
#include "diplomacy/scan.hpp"

namespace diplomacy {

namespace {

const char* terrain_name(Terrain t) {
  switch (t) {
    case Terrain::LAND: return "LAND";
    case Terrain::COAST: return "COAST";
    case Terrain::WATER: return "WATER";
  }
  return "?";
}

std::string unit_tag(const Unit& u) {
  return u.str() + " (" + power_id(u.power) + ")";
}

std::string join_path(const std::vector<std::string>& path) {
  std::string out = "[";
  for (size_t i = 0; i < path.size(); ++i) {
    if (i) out += "->";
    out += path[i];
  }
  return out + "]";
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::optional<Power> sc_controller(const GameState& state, const std::string& prov) {
  auto it = state.sc_ownership.find(prov);
  if (it == state.sc_ownership.end()) return std::nullopt;
  return it->second;
}

std::string format_message(const Message& m) {
  std::string to = m.recipient ? power_id(*m.recipient) : std::string("ALL");
  std::string tag = m.kind == MessageKind::PRIVATE ? "private" : "global";
  return "[" + m.phase + " round " + std::to_string(m.round) + "] " +
         power_id(m.sender) + " -> " + to + " (" + tag + "): " + m.content;
}

std::string format_messages(const std::vector<Message>& msgs) {
  if (msgs.empty()) return "(none)";
  std::vector<std::string> lines;
  for (const auto& m : msgs) lines.push_back(format_message(m));
  return join(lines, "\n");
}

std::string goals_text(const AgentState& agent) {
  if (agent.goals.empty()) return "(none)";
  std::vector<std::string> lines;
  for (const auto& g : agent.goals) lines.push_back("- " + g);
  return join(lines, "\n");
}

std::string relationships_text(const AgentState& agent) {
  std::vector<std::string> lines;
  for (Power p : kAllPowers) {
    auto it = agent.relationships.find(p);
    if (it == agent.relationships.end()) continue;
    lines.push_back(power_id(p) + ": " + relationship_name(it->second));
  }
  return lines.empty() ? "(none)" : join(lines, "\n");
}

std::string diary_text(const AgentState& agent, size_t window = 5) {
  std::vector<std::string> lines;
  size_t begin = agent.diary.size() > window ? agent.diary.size() - window : 0;
  for (size_t i = begin; i < agent.diary.size(); ++i) {
    const DiaryEntry& d = agent.diary[i];
    if (d.kind == DiaryKind::WARNING) {
      lines.push_back("[" + d.phase + "] (warning) " + d.negotiation_summary);
    } else {
      lines.push_back("[" + d.phase + "] " + d.negotiation_summary +
                      " | Intent: " + d.intent);
    }
  }
  return lines.empty() ? "(none)" : join(lines, "\n");
}

std::string unit_locations_text(const GameState& state) {
  std::vector<std::string> lines;
  for (Power p : kAllPowers) {
    auto units = state.units_of(p);
    if (units.empty()) continue;
    std::vector<std::string> parts;
    for (const auto& u : units) parts.push_back(u.str());
    lines.push_back(power_id(p) + ": " + join(parts, ", "));
  }
  return lines.empty() ? "(none)" : join(lines, "\n");
}

std::string supply_centers_text(const MapGraph& graph, const GameState& state) {
  std::vector<std::string> lines;
  for (Power p : kAllPowers) {
    std::vector<std::string> owned;
    for (const auto& [prov, owner] : state.sc_ownership)
      if (owner == p) owned.push_back(prov);
    if (!owned.empty()) lines.push_back(power_id(p) + ": " + join(owned, ", "));
  }
  std::vector<std::string> neutral;
  for (const auto& sc : graph.supply_centers())
    if (!state.sc_ownership.count(sc)) neutral.push_back(sc);
  if (!neutral.empty()) lines.push_back("Unowned: " + join(neutral, ", "));
  return lines.empty() ? "(none)" : join(lines, "\n");
}

std::string order_history_text(const std::vector<PhaseOrderRecord>& history,
                               int window) {
  if (history.empty() || window <= 0) return "(none)";
  size_t begin = history.size() > static_cast<size_t>(window)
                     ? history.size() - static_cast<size_t>(window)
                     : 0;
  std::vector<std::string> lines;
  for (size_t i = begin; i < history.size(); ++i) {
    lines.push_back(history[i].phase + ":");
    for (const auto& e : history[i].orders)
      lines.push_back("  " + power_id(e.power) + ": " + e.order + " (" +
                      e.outcome + ")");
  }
  return join(lines, "\n");
}

std::string possible_orders_text(const MapGraph& graph, const GameState& state,
                                 Power power) {
  auto all = enumerate_possible_orders(graph, state, power);
  if (all.empty()) return "(none)";
  std::vector<std::string> lines;
  for (const auto& [unit, list] : all) {
    lines.push_back(unit.str() + ":");
    for (const auto& o : list) lines.push_back("  " + render_order(o));
  }
  return join(lines, "\n");
}

std::string possible_moves_summary_text(const MapGraph& graph,
                                        const GameState& state, Power power) {
  auto all = enumerate_possible_orders(graph, state, power);
  std::vector<std::string> lines;
  for (const auto& [unit, list] : all) {
    std::vector<std::string> dests;
    for (const auto& o : list)
      if (o.type == ActionType::MOVE || o.type == ActionType::RETREAT)
        dests.push_back(o.target.str());
    std::sort(dests.begin(), dests.end());
    dests.erase(std::unique(dests.begin(), dests.end()), dests.end());
    lines.push_back(unit.str() + ": " + (dests.empty() ? "(no moves)" : join(dests, ", ")));
  }
  return lines.empty() ? "(none)" : join(lines, "\n");
}

// Removes the lines from the section header up to (excluding) the next
// top-level "# " header.
std::string drop_section(const std::string& text, const std::string& header) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  bool dropping = false;
  while (std::getline(in, line)) {
    if (line == header) {
      dropping = true;
      continue;
    }
    if (dropping && line.rfind("# ", 0) == 0) dropping = false;
    if (!dropping) out << line << "\n";
  }
  return out.str();
}

std::string context_text(const PromptConfig& config, const MapGraph& graph,
                         const GameState& state, const AgentState& agent,
                         const std::vector<Message>& messages_this_round,
                         const std::vector<PhaseOrderRecord>& history) {
  std::map<std::string, std::string> vars;
  vars["power_name"] = power_id(agent.power);
  vars["current_phase"] = state.phase_code();
  vars["max_year"] = std::to_string(config.max_year);
  vars["home_centers"] = join(graph.home_centers(agent.power), ", ");
  vars["agent_goals"] = goals_text(agent);
  vars["agent_relationships"] = relationships_text(agent);
  vars["order_history"] = order_history_text(history, config.order_history_window);
  vars["all_unit_locations"] = unit_locations_text(state);
  vars["all_supply_centers"] = supply_centers_text(graph, state);
  vars["possible_orders"] = possible_orders_text(graph, state, agent.power);
  vars["agent_private_diary"] = diary_text(agent);
  vars["messages_this_round"] = format_messages(messages_this_round);
  std::string text = substitute(template_text("context_prompt"), vars);
  if (config.omit_order_history) text = drop_section(text, "# Order History");
  return text;
}

void index_context_sections(RenderedPrompt& p, const PromptConfig& config) {
  p.section_index["Home Centers"] = true;
  p.section_index["Player Status"] = true;
  p.section_index["Relationships"] = true;
  p.section_index["Order History"] = !config.omit_order_history;
  p.section_index["Game Map"] = true;
  p.section_index["Possible Orders"] = true;
  p.section_index["Private Diary"] = true;
  p.section_index["Messages"] = true;
}

}  // namespace

const std::string& template_text(const std::string& name) {
  static std::mutex mu;
  static std::map<std::string, std::string> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  std::string path =
      std::string(DIPLOMACY_DATA_DIR) + "/templates/" + name + ".txt";
  std::ifstream in(path);
  if (!in) throw DipError(ErrorCode::ConfigError, "missing template: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return cache.emplace(name, buf.str()).first->second;
}

std::string substitute(const std::string& tmpl,
                       const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      size_t close = tmpl.find('}', i);
      if (close != std::string::npos) {
        std::string key = tmpl.substr(i + 1, close - i - 1);
        auto it = vars.find(key);
        if (it != vars.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

std::string render_system_prompt(Power power, PromptVariant variant) {
  (void)variant;  // the variants alter order guidance, not the system prompt
  return substitute(template_text("system_prompt"),
                    {{"power_name", power_id(power)}});
}

std::string render_unit_block(const MapGraph& graph, const GameState& state,
                              Power power, const Unit& unit) {
  const Unit* board = state.unit_in(unit.location.province);
  if (board == nullptr || !(*board == unit) || unit.power != power)
    throw DipError(ErrorCode::PreconditionViolated,
                   "unit block requires one of the power's own units on board");

  const Province& here = graph.province(unit.location.province);
  StrategicContext ctx = strategic_scan(graph, state, power, unit);
  std::ostringstream out;

  out << "Territory " << here.id << " (" << terrain_name(here.terrain) << ")";
  if (here.is_supply_center) out << " (SC)";
  out << "\n";

  std::optional<Power> holder =
      here.is_supply_center ? sc_controller(state, here.id) : std::optional<Power>(power);
  out << "Held by " << (holder ? power_display(*holder) : std::string("None"));
  if (holder && *holder == power) out << " (You)";
  out << "\n";
  out << "Units present: " << unit_tag(unit) << "\n";

  out << "# Adjacent territories:\n";
  for (const auto& adj : ctx.adjacent_details) {
    out << "  " << adj.location.province << " (" << terrain_name(adj.terrain) << ")";
    if (adj.is_supply_center) {
      out << " SC Control: "
          << (adj.controller ? power_display(*adj.controller) : std::string("None"));
    }
    if (!adj.units.empty()) {
      std::vector<std::string> tags;
      for (const auto& u : adj.units) tags.push_back(unit_tag(u));
      out << " Units: " << join(tags, ", ");
    }
    out << "\n";
    for (const auto& u : adj.units)
      out << "    -> " << unit_tag(u) << " can support or contest moves\n";
  }

  if (!ctx.nearest_foreign_units.empty()) {
    out << "# Nearest units (not ours):\n";
    for (const auto& n : ctx.nearest_foreign_units)
      out << "  " << unit_tag(n.unit) << ", path " << join_path(n.path) << "\n";
  }
  if (!ctx.nearest_uncontrolled_or_foreign_scs.empty()) {
    out << "# Nearest supply centers (not controlled by us):\n";
    for (const auto& n : ctx.nearest_uncontrolled_or_foreign_scs) {
      out << "  " << n.province << ": "
          << (n.controller ? "Controlled by " + power_display(*n.controller)
                           : std::string("Uncontrolled"))
          << ", path " << join_path(n.path) << "\n";
    }
  }
  return out.str();
}

std::string render_territory_block(const MapGraph& graph, const GameState& state,
                                   Power power, const Unit& unit) {
  if (state.phase_kind != PhaseKind::MOVEMENT)
    throw DipError(ErrorCode::PreconditionViolated,
                   "territory blocks are rendered for movement phases");
  const Province& here = graph.province(unit.location.province);
  StrategicContext ctx = strategic_scan(graph, state, power, unit);
  std::ostringstream out;

  out << "<Territory " << here.id << ">\n";
  out << "  (" << terrain_name(here.terrain) << ")";
  if (here.is_supply_center) out << " (SC)";
  out << "\n";
  std::optional<Power> holder =
      here.is_supply_center ? sc_controller(state, here.id) : std::optional<Power>(power);
  out << "  Held by " << (holder ? power_id(*holder) : std::string("None"));
  if (holder && *holder == power) out << " (You)";
  out << "\n";
  out << "  Units present: " << unit_tag(unit) << "\n";

  out << "# Adjacent territories:\n";
  for (const auto& adj : ctx.adjacent_details)
    out << "  " << adj.location.province << " (" << terrain_name(adj.terrain)
        << ")\n";

  if (!ctx.nearest_foreign_units.empty()) {
    out << "# Nearest units (not ours):\n";
    for (const auto& n : ctx.nearest_foreign_units)
      out << "  " << unit_tag(n.unit) << ", path " << join_path(n.path) << "\n";
  }
  if (!ctx.nearest_uncontrolled_or_foreign_scs.empty()) {
    out << "# Nearest supply centers (not controlled by us):\n";
    for (const auto& n : ctx.nearest_uncontrolled_or_foreign_scs) {
      out << "  " << n.province << " (Controlled by "
          << (n.controller ? power_id(*n.controller) : std::string("None"))
          << "), path " << join_path(n.path) << "\n";
    }
  }

  out << "# Possible " << unit.str() << " unit movements & supports:\n";
  // Destination provinces, land/coast first, then water, each lexicographic.
  std::vector<std::string> dests;
  for (const auto& d : graph.adjacency(unit.kind, unit.location))
    dests.push_back(d.province);
  std::sort(dests.begin(), dests.end());
  dests.erase(std::unique(dests.begin(), dests.end()), dests.end());
  std::stable_partition(dests.begin(), dests.end(), [&](const std::string& p) {
    return graph.province(p).terrain != Terrain::WATER;
  });

  auto supporters_into = [&](const std::string& prov) {
    std::vector<Unit> found;
    for (const auto& u : state.units) {
      if (u == unit) continue;
      if (u.location.province == prov) continue;
      if (can_support_into(graph, u, prov)) found.push_back(u);
    }
    std::sort(found.begin(), found.end(), [](const Unit& a, const Unit& b) {
      return a.location.province < b.location.province;
    });
    return found;
  };

  for (const auto& dest : dests) {
    const Unit* occ = state.unit_in(dest);
    out << "  " << unit.str() << " - " << dest
        << (occ ? " (occupied: " + unit_tag(*occ) + ")" : " (unoccupied)") << "\n";
    for (const auto& s : supporters_into(dest))
      out << "    Available Support: " << s.str() << " S " << unit.str() << " - "
          << dest << "\n";
  }
  out << "  " << unit.str() << " H\n";
  for (const auto& s : supporters_into(unit.location.province))
    out << "    Available Support: " << s.str() << " S " << unit.str() << "\n";

  out << "</Territory " << here.id << ">\n";
  return out.str();
}

RenderedPrompt render_order_prompt(const PromptConfig& config,
                                   const MapGraph& graph, const GameState& state,
                                   const AgentState& agent,
                                   const std::vector<Message>& messages_this_round,
                                   const std::vector<PhaseOrderRecord>& history) {
  RenderedPrompt p;
  p.system = render_system_prompt(agent.power, config.variant);
  std::string user =
      context_text(config, graph, state, agent, messages_this_round, history);

  bool summary = config.possible_moves_summary;
  if (summary) {
    user += "# Possible Moves Summary\n";
    user += possible_moves_summary_text(graph, state, agent.power);
    user += "\n";
  }
  if (config.support_explanation_12shot) user += template_text("support_examples");
  switch (config.variant) {
    case PromptVariant::BASELINE: break;
    case PromptVariant::V1: user += template_text("variant_v1"); break;
    case PromptVariant::V2: user += template_text("variant_v2"); break;
    case PromptVariant::V3: user += template_text("variant_v3"); break;
  }
  user += template_text("order_instructions");

  p.user = std::move(user);
  index_context_sections(p, config);
  p.section_index["Possible Moves Summary"] = summary;
  p.section_index["Support Examples"] = config.support_explanation_12shot;
  p.section_index["Order Writing Guidance"] =
      config.variant != PromptVariant::BASELINE;
  p.section_index["Order Instructions"] = true;
  return p;
}

RenderedPrompt render_negotiation_prompt(const PromptConfig& config,
                                         const MapGraph& graph,
                                         const GameState& state,
                                         const AgentState& agent,
                                         const std::vector<Message>& inbox,
                                         const std::vector<PhaseOrderRecord>& history) {
  if (config.press != PressMode::FULL)
    throw DipError(ErrorCode::PreconditionViolated,
                   "negotiation prompts require full press");
  RenderedPrompt p;
  p.system = render_system_prompt(agent.power, config.variant);
  std::string user = context_text(config, graph, state, agent, {}, history);
  user += "RECENT MESSAGES REQUIRING YOUR ATTENTION\n";
  user += format_messages(inbox);
  user += "\n";
  user += template_text("negotiation_instructions");
  p.user = std::move(user);
  index_context_sections(p, config);
  p.section_index["Recent Messages Requiring Your Attention"] = true;
  p.section_index["Negotiation Instructions"] = true;
  return p;
}

RenderedPrompt render_diary_prompt(const GameState& state, const AgentState& agent,
                                   const std::vector<Message>& round_messages) {
  RenderedPrompt p;
  p.system = render_system_prompt(agent.power, PromptVariant::BASELINE);
  std::map<std::string, std::string> vars;
  vars["power_name"] = power_id(agent.power);
  vars["current_phase"] = state.phase_code();
  vars["board_state_str"] =
      "Units:\n" + unit_locations_text(state);
  vars["private_diary_summary"] = diary_text(agent);
  vars["messages_this_round"] = format_messages(round_messages);
  vars["agent_goals"] = goals_text(agent);
  vars["agent_relationships"] = relationships_text(agent);
  p.user = substitute(template_text("diary_prompt"), vars);
  p.section_index["Negotiation Summary Request"] = true;
  return p;
}

}  // namespace diplomacy
