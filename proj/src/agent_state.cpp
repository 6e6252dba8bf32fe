#include "diplomacy/agent_state.hpp"

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

namespace diplomacy {

const char* relationship_name(RelationshipLevel r) {
  switch (r) {
    case RelationshipLevel::ENEMY: return "Enemy";
    case RelationshipLevel::UNFRIENDLY: return "Unfriendly";
    case RelationshipLevel::NEUTRAL: return "Neutral";
    case RelationshipLevel::FRIENDLY: return "Friendly";
    case RelationshipLevel::ALLY: return "Ally";
  }
  return "?";
}

std::optional<RelationshipLevel> relationship_from_string(const std::string& s) {
  std::string low;
  for (char c : s)
    low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (low == "enemy") return RelationshipLevel::ENEMY;
  if (low == "unfriendly") return RelationshipLevel::UNFRIENDLY;
  if (low == "neutral") return RelationshipLevel::NEUTRAL;
  if (low == "friendly") return RelationshipLevel::FRIENDLY;
  if (low == "ally") return RelationshipLevel::ALLY;
  return std::nullopt;
}

AgentState AgentState::initial(Power p, std::string binding) {
  AgentState a;
  a.power = p;
  a.model_binding = std::move(binding);
  for (Power other : kAllPowers)
    if (other != p) a.relationships[other] = RelationshipLevel::NEUTRAL;
  return a;
}

void to_json(nlohmann::json& j, const Message& m) {
  j = nlohmann::json::object();
  j["message_type"] = m.kind == MessageKind::GLOBAL ? "global" : "private";
  j["sender"] = power_id(m.sender);
  if (m.recipient) j["recipient"] = power_id(*m.recipient);
  j["content"] = m.content;
  j["phase"] = m.phase;
  j["round"] = m.round;
}

void from_json(const nlohmann::json& j, Message& m) {
  std::string kind = j.at("message_type").get<std::string>();
  m.kind = kind == "private" ? MessageKind::PRIVATE : MessageKind::GLOBAL;
  auto sender = power_from_string(j.at("sender").get<std::string>());
  if (!sender) throw DipError(ErrorCode::ProtocolError, "bad message sender");
  m.sender = *sender;
  m.recipient.reset();
  if (j.contains("recipient") && !j.at("recipient").is_null()) {
    auto r = power_from_string(j.at("recipient").get<std::string>());
    if (!r) throw DipError(ErrorCode::ProtocolError, "bad message recipient");
    m.recipient = *r;
  }
  m.content = j.at("content").get<std::string>();
  m.phase = j.value("phase", "");
  m.round = j.value("round", 1);
}

void to_json(nlohmann::json& j, const DiaryEntry& d) {
  j = nlohmann::json::object();
  j["kind"] = d.kind == DiaryKind::NEGOTIATION ? "negotiation" : "warning";
  j["phase"] = d.phase;
  j["negotiation_summary"] = d.negotiation_summary;
  j["intent"] = d.intent;
}

void from_json(const nlohmann::json& j, DiaryEntry& d) {
  d.kind = j.value("kind", std::string("negotiation")) == "warning"
               ? DiaryKind::WARNING
               : DiaryKind::NEGOTIATION;
  d.phase = j.value("phase", "");
  d.negotiation_summary = j.value("negotiation_summary", "");
  d.intent = j.value("intent", "");
}

void to_json(nlohmann::json& j, const AgentState& a) {
  j = nlohmann::json::object();
  j["power"] = power_id(a.power);
  j["goals"] = a.goals;
  nlohmann::json rel = nlohmann::json::object();
  for (const auto& [other, level] : a.relationships)
    rel[power_id(other)] = relationship_name(level);
  j["relationships"] = rel;
  j["diary"] = a.diary;
  j["model_binding"] = a.model_binding;
}

void from_json(const nlohmann::json& j, AgentState& a) {
  auto power = power_from_string(j.at("power").get<std::string>());
  if (!power) throw DipError(ErrorCode::ProtocolError, "bad agent power");
  a = AgentState::initial(*power, j.value("model_binding", ""));
  a.goals = j.value("goals", std::vector<std::string>{});
  if (j.contains("relationships"))
    for (const auto& [key, value] : j.at("relationships").items()) {
      auto other = power_from_string(key);
      auto level = relationship_from_string(value.get<std::string>());
      if (!other || !level || *other == a.power)
        throw DipError(ErrorCode::ProtocolError, "bad relationship entry");
      a.relationships[*other] = *level;
    }
  a.diary = j.value("diary", std::vector<DiaryEntry>{});
}

}  // namespace diplomacy
