#pragma once

#include "starnet/elliptic.hpp"
#include "starnet/network.hpp"
#include "starnet/problem.hpp"
#include "starnet/rothe.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace starnet {

/// Per-level junction corrections
/// beta_p = (g(0, l_{p+1}) - g(0, l_p)) / dl - d_l g(0, l_p), p = 0..n_l-1.
struct BetaConstants {
  std::vector<double> beta;
};

/// d_l g(0, l): the declared derivative when present, otherwise a centered
/// difference with spacing dl/16 (second-order one-sided near the ends).
double junction_l_derivative(const ProblemData& data, const GridSpec& grid, double l);

BetaConstants beta_constants(const ProblemData& data, const GridSpec& grid);

struct BackwardOptions {
  /// Drop beta_p from the junction row (negative-test mode).
  bool naive_beta = false;
  /// Run validate_assumptions first and refuse failing data.
  bool validate = true;
};

/// Classical tables of level p: lambda_p = 1/dl + r(., l_p) and
/// gamma_p = phi(., l_p) + beta_p - u^{p+1}(., 0) / dl.
ClassicalTables level_tables(int p, std::span<const double> u_next_junction, const ProblemData& data,
                             const GridSpec& grid, double beta_p);

/// One level of the backward recursion, solved as a classical problem.
Trajectory solve_level(int p, std::span<const double> u_next_junction, const ProblemData& data, const GridSpec& grid,
                       Convection scheme, const BackwardOptions& options = {});

/// Level n_l is psi; levels n_l-1 .. 0 are solved in turn.
SolutionCube run_backward(const ProblemData& data, const GridSpec& grid, Convection scheme,
                          const BackwardOptions& options = {});

struct KirchhoffResidual {
  Eigen::MatrixXd table;     // n_l x (n_t+1), row p, column k
  double sup = 0.0;          // over every p < n_l
  double sup_interior = 0.0; // over p <= n_l - 2
};

/// (u^{p+1}(t,0) - u^p(t,0)) / dl + sum_i alpha_i D_i u^p(t,0) - r u^p(t,0) - phi
/// at every node (t_k, l_p), p < n_l, with D_i the solver's one-sided stencil.
KirchhoffResidual kirchhoff_residual(const SolutionCube& cube, const ProblemData& data, const GridSpec& grid);

}  // namespace starnet
