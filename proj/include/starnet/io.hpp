#pragma once

#include "starnet/certificates.hpp"
#include "starnet/problem.hpp"
#include "starnet/verification.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace starnet {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A problem document: either kind, plus an optional default grid.
struct LoadedProblem {
  enum class Kind { LocalTime, Classical };
  Kind kind = Kind::LocalTime;
  ProblemData local;
  ClassicalProblemData classical;
  std::optional<GridCounts> grid;
  std::string description;

  const std::string& name() const { return kind == Kind::LocalTime ? local.name : classical.name; }
};

/// Field values are expression strings, numbers, objects
/// {"expr": ..., "sup": ..., "lip": ...}, or per-ray arrays of those.
/// Unknown keys are rejected with ConfigError.
LoadedProblem parse_problem(const nlohmann::json& doc, const std::string& origin = "<memory>");
LoadedProblem load_problem(const std::string& path);

/// Finite values as numbers, others as the strings "inf", "-inf", "nan".
nlohmann::json json_number(double value);

nlohmann::json to_json(const ValidationReport& report);
nlohmann::json to_json(const ConstantSet& constants);
nlohmann::json to_json(const CertificateReport& report);
nlohmann::json to_json(const SweepResult& sweep);

}  // namespace starnet
