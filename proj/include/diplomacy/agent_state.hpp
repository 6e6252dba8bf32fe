#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "diplomacy/core.hpp"

namespace diplomacy {

// Ally=+2 .. Enemy=-2; the numeric mapping is load-bearing for metrics.
enum class RelationshipLevel {
  ENEMY = -2,
  UNFRIENDLY = -1,
  NEUTRAL = 0,
  FRIENDLY = 1,
  ALLY = 2,
};

const char* relationship_name(RelationshipLevel r);  // "Enemy" .. "Ally"
// Case-insensitive; empty for unrecognized words.
std::optional<RelationshipLevel> relationship_from_string(const std::string& s);

enum class MessageKind { GLOBAL, PRIVATE };

struct Message {
  MessageKind kind = MessageKind::GLOBAL;
  Power sender = Power::AUSTRIA;
  std::optional<Power> recipient;  // present iff PRIVATE
  std::string content;
  std::string phase;  // "S1901M"
  int round = 1;

  bool operator==(const Message&) const = default;
};

enum class DiaryKind { NEGOTIATION, WARNING };

struct DiaryEntry {
  DiaryKind kind = DiaryKind::NEGOTIATION;
  std::string phase;
  std::string negotiation_summary;
  std::string intent;

  bool operator==(const DiaryEntry&) const = default;
};

struct AgentState {
  Power power = Power::AUSTRIA;
  std::vector<std::string> goals;
  std::map<Power, RelationshipLevel> relationships;  // the six other powers
  std::vector<DiaryEntry> diary;                     // append-only
  std::string model_binding;  // endpoint name or scripted-policy id

  // All-NEUTRAL relationships, empty goals and diary.
  static AgentState initial(Power p, std::string binding = "");
};

void to_json(nlohmann::json& j, const Message& m);
void from_json(const nlohmann::json& j, Message& m);
void to_json(nlohmann::json& j, const DiaryEntry& d);
void from_json(const nlohmann::json& j, DiaryEntry& d);
void to_json(nlohmann::json& j, const AgentState& a);
void from_json(const nlohmann::json& j, AgentState& a);

}  // namespace diplomacy
