#pragma once

#include <array>
#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace diplomacy {

enum class Power { AUSTRIA, ENGLAND, FRANCE, GERMANY, ITALY, RUSSIA, TURKEY };

// Canonical processing order for logging and adjudication input assembly.
inline constexpr std::array<Power, 7> kAllPowers = {
    Power::AUSTRIA, Power::ENGLAND, Power::FRANCE, Power::GERMANY,
    Power::ITALY,   Power::RUSSIA,  Power::TURKEY};

const std::string& power_id(Power p);        // "FRANCE"
const std::string& power_display(Power p);   // "France"
std::optional<Power> power_from_string(const std::string& s);  // case-insensitive

enum class ErrorCode {
  MalformedMap,
  DuplicateProvince,
  AsymmetricAdjacency,
  UnknownTerrain,
  UnknownCoast,
  UnknownProvince,
  IllegalLocation,
  MalformedSyntax,
  NotYourUnit,
  IllegalCoast,
  UnknownPhase,
  LogInconsistent,
  UnknownVersion,
  UnknownMethod,
  TimedOut,
  RateLimited,
  ProtocolError,
  AuthError,
  NoJsonFound,
  UnbalancedJson,
  JudgeOutputMalformed,
  LengthMismatch,
  DegenerateMarginals,
  DegenerateVariance,
  ConfigError,
  PreconditionViolated,
};

class DipError : public std::runtime_error {
 public:
  DipError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

// A province plus an optional coast qualifier ("STP" / "NC").
struct Location {
  std::string province;
  std::string coast;  // empty when unqualified

  auto operator<=>(const Location&) const = default;

  // "STP/NC" or "PAR"
  std::string str() const {
    return coast.empty() ? province : province + "/" + coast;
  }
  static Location parse(const std::string& text);  // throws MalformedSyntax
};

}  // namespace diplomacy
