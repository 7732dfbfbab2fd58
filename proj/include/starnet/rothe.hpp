#pragma once

#include "starnet/elliptic.hpp"
#include "starnet/network.hpp"
#include "starnet/problem.hpp"

#include <Eigen/Dense>

#include <vector>

namespace starnet {

/// Classical-problem data sampled on the (t, x) grid; rows are time nodes.
struct ClassicalTables {
  GridSpec grid;
  std::vector<Eigen::MatrixXd> a, b, c, f;  // per ray, (n_t+1) x (n_x+1)
  Eigen::MatrixXd alpha;                    // (n_t+1) x I
  Eigen::VectorXd lambda, gamma;            // n_t+1
  NetworkField initial;
  double a_floor = 0.0;
  double alpha_floor = 0.0;
};

ClassicalTables sample_classical(const ClassicalProblemData& data, const GridSpec& grid);

struct Trajectory {
  GridSpec grid;
  FieldSeries fields;  // k = 0..n_t
};

/// Implicit march u^0 = initial, then one elliptic step per time node with
/// the Kirchhoff data taken at t_k. Throws std::invalid_argument when the
/// time rate 1/dt falls below admissible_rate(|c|_inf).
Trajectory march_classical(const ClassicalTables& tables, Convection scheme);

/// Validates the classical assumptions first; a failing report is thrown as AssumptionViolation.
Trajectory march_classical(const ClassicalProblemData& data, const GridSpec& grid, Convection scheme);

/// Piecewise-linear interpolation in time between stored fields.
NetworkField interpolant_v(const Trajectory& traj, double t);

struct TimeDerivativeNorms {
  std::vector<double> field_sup;  // k = 1..n_t: |u^k - u^{k-1}|_inf / dt
  std::vector<double> junction;   // k = 1..n_t: |u^k(0) - u^{k-1}(0)| / dt
  double field_max = 0.0;
  double junction_max = 0.0;
};

TimeDerivativeNorms discrete_time_derivative(const Trajectory& traj);

/// max_k of the centered-difference gradient at interior nodes.
double max_interior_gradient(const FieldSeries& fields, double dx);

}  // namespace starnet
