#pragma once

#include "starnet/network.hpp"

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace starnet {

/// Scalar coefficient evaluated as f(t, x, l).
///
/// Fields that only depend on (t, l) (alpha, r, phi) ignore x; psi ignores l;
/// the initial datum g ignores t. Classical (l-free) data ignore l.
struct CoefficientField {
  using Evaluator = std::function<double(double t, double x, double l)>;

  Evaluator evaluator;
  std::optional<double> declared_sup;
  std::optional<double> declared_lip;
  std::string description;

  double operator()(double t, double x, double l) const { return evaluator(t, x, l); }
  explicit operator bool() const { return static_cast<bool>(evaluator); }

  static CoefficientField constant(double value);
  static CoefficientField from_expression(const std::string& source);
  static CoefficientField from_function(Evaluator fn, std::string description = "<function>");
};

using RayFields = std::vector<CoefficientField>;

/// One instance of the local-time Kirchhoff problem on a star network.
struct ProblemData {
  std::string name;
  StarNetwork network;
  double horizon = 1.0;  // T
  double l_max = 1.0;    // K

  RayFields a, b, c, f;  // per ray, (t, x, l)
  RayFields alpha;       // per ray, (t, l)
  CoefficientField r;    // (t, l), non-negative
  CoefficientField phi;  // (t, l)
  RayFields psi;         // per ray, (t, x): Dirichlet plane at l = K
  RayFields g;           // per ray, (x, l): initial plane at t = 0

  double a_floor = 0.0;
  double alpha_floor = 0.0;

  /// Optional analytic d/dl g(0, l); evaluated as (0, 0, l).
  std::optional<CoefficientField> g_l_junction;
  /// Optional exact solution per ray, used by verification tooling only.
  std::optional<RayFields> exact;
  /// Norm overrides consumed by the certificate module (keys as in NormInputs).
  std::map<std::string, double> declared_norms;
};

/// Classical Kirchhoff problem: no l variable, Robin-Kirchhoff junction row
/// -lambda(t) u(t,0) + sum_i alpha_i(t) d_x u_i(t,0) = gamma(t).
struct ClassicalProblemData {
  std::string name;
  StarNetwork network;
  double horizon = 1.0;

  RayFields a, b, c, f;    // per ray, (t, x)
  RayFields alpha;         // per ray, (t)
  CoefficientField lambda; // (t)
  CoefficientField gamma;  // (t)
  RayFields g;             // per ray, (x)

  double a_floor = 0.0;
  double alpha_floor = 0.0;
  double lambda_floor = 0.0;

  std::optional<RayFields> exact;
  std::map<std::string, double> declared_norms;
};

/// Outcome of sampling the assumptions on grid nodes.
///
/// For floor conditions (`kind == Floor`) the margin is min(value - floor) and
/// the entry passes when it is non-negative. For equality conditions
/// (`kind == Equality`) the margin is the worst absolute defect and the entry
/// passes when it does not exceed `tolerance`.
struct ValidationEntry {
  enum class Kind { Floor, Equality };
  std::string name;
  Kind kind = Kind::Equality;
  double margin = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::string where;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  /// Declared sup/Lipschitz bounds exceeded by sampled data. Reported, never
  /// gating: certificates built from stale declarations are caught by certify.
  std::vector<ValidationEntry> declared_bound_warnings;

  bool pass() const;
  const ValidationEntry* find(const std::string& name) const;
  std::string summary() const;
};

class AssumptionViolation : public std::runtime_error {
 public:
  explicit AssumptionViolation(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Per-level (fixed l_p) coefficient tables; rows are time nodes k = 0..n_t.
struct LevelTables {
  std::vector<Eigen::MatrixXd> a, b, c, f;  // per ray, (n_t+1) x (n_x+1)
  Eigen::MatrixXd alpha;                    // (n_t+1) x I
  Eigen::VectorXd r, phi;                   // n_t+1
};

/// Dense tables of every coefficient at every grid node. Each evaluator is
/// called exactly once per node.
struct CoefficientTables {
  GridSpec grid;
  std::vector<LevelTables> levels;          // p = 0..n_l
  std::vector<Eigen::MatrixXd> psi;         // per ray, (n_t+1) x (n_x+1)
  std::vector<Eigen::MatrixXd> g;           // per ray, (n_l+1) x (n_x+1)
};

/// Default tolerances: 1e-8 for exact conditions and
/// 10 * (dx^2 + dl^2) * max(1, |g|_inf) for difference-based ones.
struct ValidationTolerances {
  double exact = 1e-8;
  double difference = 0.0;
};
ValidationTolerances default_tolerances(const ProblemData& data, const GridSpec& grid);
ValidationTolerances default_tolerances(const ClassicalProblemData& data, const GridSpec& grid);

/// Checks the ellipticity floors and the corner compatibility conditions of
/// the local-time problem on grid nodes. A given `tol` overrides both default
/// tolerances.
ValidationReport validate_assumptions(const ProblemData& data, const GridSpec& grid,
                                      std::optional<double> tol = std::nullopt);
ValidationReport validate_classical(const ClassicalProblemData& data, const GridSpec& grid,
                                    std::optional<double> tol = std::nullopt);

CoefficientTables sample_coefficients(const ProblemData& data, const GridSpec& grid);
/// Tables at a single level l_p, sampled on the (t, x) grid.
LevelTables sample_level(const ProblemData& data, const GridSpec& grid, int p);

/// Throws std::invalid_argument when the per-ray field arrays do not match
/// the network's ray count or a required field is missing.
void check_shape(const ProblemData& data);
void check_shape(const ClassicalProblemData& data);

/// Second-order one-sided (or centered) derivative of a scalar function at s,
/// picking the stencil that stays inside [lo, hi].
double second_order_derivative(const std::function<double(double)>& fn, double s, double h, double lo, double hi);

}  // namespace starnet
