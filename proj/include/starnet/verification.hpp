#pragma once

#include "starnet/elliptic.hpp"
#include "starnet/local_time.hpp"
#include "starnet/network.hpp"
#include "starnet/problem.hpp"
#include "starnet/rothe.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace starnet {

/// Ansatz u_i(t, x, l) = e^{-t} cos(pi x / R) h(l) on every ray.
struct CosineSpec {
  StarNetwork network{3, 1.0};
  double horizon = 1.0;
  double l_max = 1.0;
  std::function<double(double)> h;
  std::function<double(double)> h_prime;
  std::string h_description = "h";
  CoefficientField a = CoefficientField::constant(1.0);
  CoefficientField b = CoefficientField::constant(0.0);
  CoefficientField c = CoefficientField::constant(0.0);
  CoefficientField r = CoefficientField::constant(0.0);
  double alpha = 1.0;  // same weight on every ray; the junction flux vanishes
  double a_floor = 1.0;
  double alpha_floor = 1.0;
};

struct ManufacturedCase {
  ProblemData data;  // data.exact holds the ansatz
  std::string description;
};

/// f = d_t u - a d_xx u + b d_x u + c u, phi = e^{-t}(h' - r h), psi = u(., ., K),
/// g = u(0, ., .), d_l g(0, l) = h'(l). Requires |h(K) - 1| <= 1e-12.
ManufacturedCase manufactured_cosine(const CosineSpec& spec);

struct ErrorNorms {
  double sup = 0.0;
  double rms = 0.0;
};

/// Node-wise differences against `exact` (per ray, evaluated at (t, x, l_p)).
ErrorNorms error_norms(const SolutionCube& cube, const RayFields& exact);
ErrorNorms error_norms(const Trajectory& traj, const RayFields& exact);

/// Least-squares slope of log(error) against log(spacing).
double convergence_order(std::span<const double> errors, std::span<const double> spacings);

struct GridCounts {
  int n_t = 16;
  int n_x = 32;
  int n_l = 16;
};

enum class RefineAxis { Time, Space, Level };
const char* to_string(RefineAxis axis);

/// One refinement sweep along a single axis: the chosen count is doubled
/// `runs - 1` times from `base` while the other two counts stay at `held`.
///
/// Errors are sup norms against a reference run whose count on the refined
/// axis is `reference_factor` times the finest run's, on the coarse run's
/// nodes. The held axes are identical in every run and in the reference, so
/// their error contributions cancel and the slope isolates one axis. The sup
/// error against data.exact is reported alongside when available.
struct SweepResult {
  RefineAxis axis = RefineAxis::Time;
  std::vector<GridCounts> grids;
  GridCounts reference;
  std::vector<double> spacings;
  std::vector<double> errors;        // against the reference run
  std::vector<double> exact_errors;  // against data.exact (empty without one)
  double order = 0.0;
};

SweepResult refinement_sweep(const ProblemData& data, RefineAxis axis, GridCounts base, GridCounts held, int runs,
                             Convection scheme, int reference_factor = 8, int threads = 1);

/// max over the coarse cube's nodes of |coarse - fine|, where every coarse
/// node is a node of the fine grid (dyadic refinement in any axes).
double cube_distance(const SolutionCube& coarse, const SolutionCube& fine);

struct ComparisonResult {
  bool pass = true;
  double worst_violation = 0.0;  // max(original - perturbed, 0) over the cube
  std::string where;
};

/// Runs the backward scheme with upwind convection on `data` and on data with
/// f + bump and phi - drop, and checks the second cube dominates the first
/// up to 1e-10.
ComparisonResult comparison_test(const ProblemData& data, const GridSpec& grid, const CoefficientField& bump,
                                 const CoefficientField& drop);
/// Classical counterpart: f + bump and gamma - drop.
ComparisonResult comparison_test(const ClassicalProblemData& data, const GridSpec& grid,
                                 const CoefficientField& bump, const CoefficientField& drop);

struct InterpolationStatement {
  enum class Status { Pass, Fail, Vacuous };
  Status status = Status::Vacuous;
  double observed = 0.0;  // discrete Holder quotient of d_x u
  double bound = 0.0;     // interpolation constant
  double exponent = 0.0;
};

struct InterpolationCheck {
  double nu1 = 0.0, nu2 = 0.0, nu3 = 0.0;
  InterpolationStatement time, level;
  bool pass() const {
    return time.status != InterpolationStatement::Status::Fail &&
           level.status != InterpolationStatement::Status::Fail;
  }
};

const char* to_string(InterpolationStatement::Status status);

/// 2 nu3 (nu / (gamma nu3))^{gamma/(1+gamma)} + 2 nu (gamma nu3 / nu)^{-1/(1+gamma)}.
double interpolation_constant(double nu, double nu3, double gamma);

/// Measures nu1 (t-Holder of u, exponent alpha), nu2 (l-Holder, exponent beta)
/// and nu3 (x-Holder of d_x u, exponent gamma) on the cube, d_x u taken by
/// forward differences at cell midpoints, then checks both conclusions of
/// the interpolation inequality over pairs at distance <= 1. A statement
/// whose nu (or nu3) is <= 1e-8 is reported vacuous.
InterpolationCheck holder_interpolation_check(const SolutionCube& cube, double alpha, double beta, double gamma,
                                              double tol);

}  // namespace starnet
