#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "diplomacy/agent_state.hpp"
#include "diplomacy/llm_client.hpp"
#include "diplomacy/orders.hpp"
#include "diplomacy/state_repr.hpp"

namespace diplomacy {

struct MessageProposal {
  std::vector<Message> messages;
  bool model_failed = false;  // both attempts failed: silent round
  TokenUsage usage;
};

struct OrderDecision {
  std::vector<UnitOrder> orders;  // exactly one per ordering slot
  int invalid_count = 0;          // final submissions rejected by validation
  bool model_failed = false;      // total failure: defaults, invalid_count 0
  TokenUsage usage;
};

// The phase default: Hold for movement, Disband for retreats, Waive for
// builds, Disband for forced removals.
UnitOrder default_order_for(const Unit& unit, const GameState& state);

// Applies a parsed diary-update payload to the agent: appends the
// negotiation entry, replaces goals when provided, updates recognized
// relationships, and records warnings for unrecognized tokens.
void apply_diary_payload(AgentState& agent, const nlohmann::json& payload,
                         const std::string& phase);

// One power's interface to its model. All operations implement the paper's
// retry protocol: one retry on failure or malformed output, then defaults.
class Agent {
 public:
  Agent(AgentState state, std::shared_ptr<ModelClient> client);

  const AgentState& state() const { return state_; }
  AgentState& state() { return state_; }

  MessageProposal propose_messages(const RenderedPrompt& prompt,
                                   const std::string& phase, int round,
                                   int limit = 6);

  // Runs the diary call for `phase` and folds the response into the agent
  // state; a malformed response (after the retry) leaves only a warning.
  TokenUsage update_from_negotiation(const RenderedPrompt& prompt,
                                     const std::string& phase);

  OrderDecision decide_orders(const RenderedPrompt& prompt,
                              const MapGraph& graph, const GameState& game,
                              const std::map<Unit, std::vector<UnitOrder>>& legal);

  TokenUsage cumulative_usage() const { return cumulative_; }

 private:
  // One call plus one retry; nullopt when both attempts throw.
  std::optional<Completion> try_call(const RenderedPrompt& prompt);

  AgentState state_;
  std::shared_ptr<ModelClient> client_;
  TokenUsage cumulative_;
};

}  // namespace diplomacy
