#include "diplomacy/core.hpp"

#include <algorithm>
#include <cctype>

namespace diplomacy {

namespace {
const std::array<std::string, 7> kPowerIds = {
    "AUSTRIA", "ENGLAND", "FRANCE", "GERMANY", "ITALY", "RUSSIA", "TURKEY"};
const std::array<std::string, 7> kPowerDisplay = {
    "Austria", "England", "France", "Germany", "Italy", "Russia", "Turkey"};
}  // namespace

const std::string& power_id(Power p) {
  return kPowerIds[static_cast<size_t>(p)];
}

const std::string& power_display(Power p) {
  return kPowerDisplay[static_cast<size_t>(p)];
}

std::optional<Power> power_from_string(const std::string& s) {
  std::string up;
  up.reserve(s.size());
  for (char c : s) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  for (size_t i = 0; i < kPowerIds.size(); ++i) {
    if (up == kPowerIds[i]) return static_cast<Power>(i);
  }
  return std::nullopt;
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedMap: return "MalformedMap";
    case ErrorCode::DuplicateProvince: return "DuplicateProvince";
    case ErrorCode::AsymmetricAdjacency: return "AsymmetricAdjacency";
    case ErrorCode::UnknownTerrain: return "UnknownTerrain";
    case ErrorCode::UnknownCoast: return "UnknownCoast";
    case ErrorCode::UnknownProvince: return "UnknownProvince";
    case ErrorCode::IllegalLocation: return "IllegalLocation";
    case ErrorCode::MalformedSyntax: return "MalformedSyntax";
    case ErrorCode::NotYourUnit: return "NotYourUnit";
    case ErrorCode::IllegalCoast: return "IllegalCoast";
    case ErrorCode::UnknownPhase: return "UnknownPhase";
    case ErrorCode::LogInconsistent: return "LogInconsistent";
    case ErrorCode::UnknownVersion: return "UnknownVersion";
    case ErrorCode::UnknownMethod: return "UnknownMethod";
    case ErrorCode::TimedOut: return "TimedOut";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::NoJsonFound: return "NoJsonFound";
    case ErrorCode::UnbalancedJson: return "UnbalancedJson";
    case ErrorCode::JudgeOutputMalformed: return "JudgeOutputMalformed";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateMarginals: return "DegenerateMarginals";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
  }
  return "Unknown";
}

Location Location::parse(const std::string& text) {
  std::string up;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c)))
      up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  Location loc;
  auto slash = up.find('/');
  if (slash == std::string::npos) {
    loc.province = up;
  } else {
    loc.province = up.substr(0, slash);
    loc.coast = up.substr(slash + 1);
    if (loc.coast.empty() || loc.coast.find('/') != std::string::npos)
      throw DipError(ErrorCode::MalformedSyntax, "bad coast qualifier: " + text);
  }
  if (loc.province.empty())
    throw DipError(ErrorCode::MalformedSyntax, "empty location: " + text);
  return loc;
}

}  // namespace diplomacy
