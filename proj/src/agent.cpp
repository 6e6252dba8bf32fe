#include "diplomacy/agent.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

namespace diplomacy {

namespace {

using nlohmann::json;

void add_warning(AgentState& agent, const std::string& phase,
                 const std::string& text) {
  DiaryEntry w;
  w.kind = DiaryKind::WARNING;
  w.phase = phase;
  w.negotiation_summary = text;
  agent.diary.push_back(w);
}

std::optional<Message> parse_message_entry(const json& entry, Power sender,
                                           const std::string& phase,
                                           int round) {
  if (!entry.is_object()) return std::nullopt;
  std::string type = entry.value("message_type", "");
  std::transform(type.begin(), type.end(), type.begin(), ::tolower);
  if (!entry.contains("content") || !entry["content"].is_string())
    return std::nullopt;
  Message m;
  m.sender = sender;
  m.content = entry["content"].get<std::string>();
  m.phase = phase;
  m.round = round;
  if (m.content.empty()) return std::nullopt;
  if (type == "global") {
    m.kind = MessageKind::GLOBAL;
    return m;
  }
  if (type != "private") return std::nullopt;
  m.kind = MessageKind::PRIVATE;
  if (!entry.contains("recipient") || !entry["recipient"].is_string())
    return std::nullopt;
  auto rcpt = power_from_string(entry["recipient"].get<std::string>());
  if (!rcpt || *rcpt == sender) return std::nullopt;
  m.recipient = rcpt;
  return m;
}

}  // namespace

UnitOrder default_order_for(const Unit& unit, const GameState& state) {
  UnitOrder o;
  o.unit = unit;
  switch (state.phase_kind) {
    case PhaseKind::MOVEMENT:
      o.type = ActionType::HOLD;
      break;
    case PhaseKind::RETREAT:
      o.type = ActionType::DISBAND;
      break;
    case PhaseKind::ADJUSTMENT:
      // Build slots waive; forced removals disband.
      o.type = state.unit_in(unit.location.province) != nullptr
                   ? ActionType::DISBAND
                   : ActionType::WAIVE;
      break;
  }
  return o;
}

void apply_diary_payload(AgentState& agent, const json& payload,
                         const std::string& phase) {
  if (!payload.is_object())
    throw DipError(ErrorCode::ProtocolError, "diary payload is not an object");

  DiaryEntry entry;
  entry.kind = DiaryKind::NEGOTIATION;
  entry.phase = phase;
  entry.negotiation_summary = payload.value("negotiation_summary", "");
  entry.intent = payload.value("intent", "");
  agent.diary.push_back(entry);

  if (payload.contains("goals") && payload["goals"].is_array()) {
    std::vector<std::string> goals;
    for (const auto& g : payload["goals"])
      if (g.is_string()) goals.push_back(g.get<std::string>());
    agent.goals = std::move(goals);
  }

  if (payload.contains("updated_relationships") &&
      payload["updated_relationships"].is_object()) {
    for (const auto& [key, value] : payload["updated_relationships"].items()) {
      auto power = power_from_string(key);
      auto level = value.is_string()
                       ? relationship_from_string(value.get<std::string>())
                       : std::nullopt;
      if (!power || *power == agent.power || !level) {
        add_warning(agent, phase,
                    "ignored relationship update: " + key + " -> " +
                        (value.is_string() ? value.get<std::string>()
                                           : value.dump()));
        continue;
      }
      agent.relationships[*power] = *level;
    }
  }
}

Agent::Agent(AgentState state, std::shared_ptr<ModelClient> client)
    : state_(std::move(state)), client_(std::move(client)) {}

std::optional<Completion> Agent::try_call(const RenderedPrompt& prompt) {
  std::vector<ChatTurn> convo{{"system", prompt.system},
                              {"user", prompt.user}};
  try {
    Completion c = client_->complete(convo);
    cumulative_ += c.usage;
    return c;
  } catch (const DipError&) {
    // transport or protocol failure; the caller's retry loop decides
    return std::nullopt;
  }
}

MessageProposal Agent::propose_messages(const RenderedPrompt& prompt,
                                        const std::string& phase, int round,
                                        int limit) {
  MessageProposal out;
  TokenUsage before = cumulative_;
  auto spent = [&] {
    TokenUsage u = cumulative_;
    u.prompt_tokens -= before.prompt_tokens;
    u.completion_tokens -= before.completion_tokens;
    return u;
  };
  for (int attempt = 0; attempt < 2; ++attempt) {
    auto completion = try_call(prompt);
    if (!completion) continue;  // one retry covers transport failures too
    try {
      json payload = extract_json_payload(completion->text);
      if (!payload.is_array())
        throw DipError(ErrorCode::ProtocolError, "expected a JSON array");
      for (const auto& entry : payload) {
        if (static_cast<int>(out.messages.size()) >= limit) break;
        auto m = parse_message_entry(entry, state_.power, phase, round);
        if (m) out.messages.push_back(std::move(*m));
      }
      out.usage = spent();
      return out;
    } catch (const DipError&) {
      // malformed output: retry once, then fall through to silence
    }
  }
  out.model_failed = true;  // the paper's "no communication" default
  out.messages.clear();
  out.usage = spent();
  return out;
}

TokenUsage Agent::update_from_negotiation(const RenderedPrompt& prompt,
                                          const std::string& phase) {
  for (const auto& d : state_.diary)
    if (d.kind == DiaryKind::NEGOTIATION && d.phase == phase)
      throw DipError(ErrorCode::PreconditionViolated,
                     "negotiation diary already written for " + phase);
  TokenUsage before = cumulative_;
  for (int attempt = 0; attempt < 2; ++attempt) {
    auto completion = try_call(prompt);
    if (!completion) continue;
    try {
      json payload = extract_json_payload(completion->text);
      apply_diary_payload(state_, payload, phase);
      TokenUsage spent = cumulative_;
      spent.prompt_tokens -= before.prompt_tokens;
      spent.completion_tokens -= before.completion_tokens;
      return spent;
    } catch (const DipError&) {
    }
  }
  add_warning(state_, phase, "diary update failed: unusable model response");
  TokenUsage spent = cumulative_;
  spent.prompt_tokens -= before.prompt_tokens;
  spent.completion_tokens -= before.completion_tokens;
  return spent;
}

OrderDecision Agent::decide_orders(
    const RenderedPrompt& prompt, const MapGraph& graph, const GameState& game,
    const std::map<Unit, std::vector<UnitOrder>>& legal) {
  // Ordering slots: one per unit, except builds where the army/fleet
  // alternatives for one home center form a single slot keyed by province.
  const bool building = game.phase_kind == PhaseKind::ADJUSTMENT &&
                        !legal.empty() &&
                        !legal.begin()->second.empty() &&
                        legal.begin()->second.front().type == ActionType::BUILD;
  std::map<std::string, Unit> slots;  // slot key -> representative unit
  for (const auto& [unit, list] : legal)
    slots.emplace(building ? unit.location.province : unit.str(), unit);

  OrderDecision out;
  TokenUsage before = cumulative_;
  std::map<std::string, UnitOrder> chosen;

  auto finalize = [&] {
    for (const auto& [key, unit] : slots) {
      auto it = chosen.find(key);
      out.orders.push_back(it != chosen.end() ? it->second
                                              : default_order_for(unit, game));
    }
    out.usage = cumulative_;
    out.usage.prompt_tokens -= before.prompt_tokens;
    out.usage.completion_tokens -= before.completion_tokens;
  };

  json payload;
  bool got_payload = false;
  for (int attempt = 0; attempt < 2 && !got_payload; ++attempt) {
    auto completion = try_call(prompt);
    if (!completion) continue;
    try {
      json parsed = extract_json_payload(completion->text);
      if (!parsed.is_object() || !parsed.contains("orders") ||
          !parsed["orders"].is_array())
        throw DipError(ErrorCode::ProtocolError, "missing orders array");
      payload = parsed["orders"];
      got_payload = true;
    } catch (const DipError&) {
    }
  }
  if (!got_payload) {
    out.model_failed = true;  // failure, not invalidity: defaults at count 0
    finalize();
    return out;
  }

  for (const auto& entry : payload) {
    if (!entry.is_string()) {
      ++out.invalid_count;
      continue;
    }
    UnitOrder order;
    try {
      order = parse_order(entry.get<std::string>(), state_.power, game, graph);
    } catch (const DipError&) {
      ++out.invalid_count;
      continue;
    }
    std::string key =
        building ? order.unit.location.province : order.unit.str();
    auto slot = slots.find(key);
    if (slot == slots.end() || chosen.count(key)) {
      ++out.invalid_count;  // no such slot, or the unit is already ordered
      continue;
    }
    auto in_list = legal.find(order.unit);
    bool listed = in_list != legal.end() &&
                  std::find(in_list->second.begin(), in_list->second.end(),
                            order) != in_list->second.end();
    // Cross-power supports are legal but never enumerated; fall back to the
    // adjudicator's validity test.
    if (!listed && !order_is_valid(graph, game, order)) {
      ++out.invalid_count;
      continue;
    }
    chosen.emplace(key, order);
  }
  finalize();
  return out;
}

}  // namespace diplomacy
