#include "starnet/local_time.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace starnet {

double junction_l_derivative(const ProblemData& data, const GridSpec& grid, double l) {
  if (data.g_l_junction) return (*data.g_l_junction)(0.0, 0.0, l);
  const double h = grid.dl() / 16.0;
  const double K = grid.l_max();
  auto g0 = [&](double s) { return data.g[0](0.0, 0.0, s); };
  if (l - h >= 0.0 && l + h <= K) return (g0(l + h) - g0(l - h)) / (2.0 * h);
  if (l + 2.0 * h <= K) return (-3.0 * g0(l) + 4.0 * g0(l + h) - g0(l + 2.0 * h)) / (2.0 * h);
  return (3.0 * g0(l) - 4.0 * g0(l - h) + g0(l - 2.0 * h)) / (2.0 * h);
}

namespace {

double beta_at(int p, const ProblemData& data, const GridSpec& grid) {
  const double l0 = grid.level_node(p);
  const double l1 = grid.level_node(p + 1);
  return (data.g[0](0.0, 0.0, l1) - data.g[0](0.0, 0.0, l0)) / grid.dl() - junction_l_derivative(data, grid, l0);
}

}  // namespace

BetaConstants beta_constants(const ProblemData& data, const GridSpec& grid) {
  BetaConstants out;
  out.beta.resize(grid.n_l());
  for (int p = 0; p < grid.n_l(); ++p) out.beta[p] = beta_at(p, data, grid);
  return out;
}

ClassicalTables level_tables(int p, std::span<const double> u_next_junction, const ProblemData& data,
                             const GridSpec& grid, double beta_p) {
  if (p < 0 || p >= grid.n_l()) throw std::out_of_range("level index outside [0, n_l)");
  if (static_cast<int>(u_next_junction.size()) != grid.n_t() + 1)
    throw std::invalid_argument("next-level junction trace needs n_t + 1 entries");
  const int I = grid.rays();
  const int nt = grid.n_t();
  const double rate = 1.0 / grid.dl();

  LevelTables level = sample_level(data, grid, p);
  ClassicalTables out;
  out.grid = grid;
  out.a = std::move(level.a);
  out.b = std::move(level.b);
  out.c = std::move(level.c);
  out.f = std::move(level.f);
  out.alpha = std::move(level.alpha);
  out.lambda = level.r.array() + rate;
  out.gamma.resize(nt + 1);
  for (int k = 0; k <= nt; ++k) out.gamma(k) = level.phi(k) + beta_p - rate * u_next_junction[k];

  const double l = grid.level_node(p);
  out.initial = NetworkField(I, grid.n_x());
  out.initial.junction() = data.g[0](0.0, 0.0, l);
  for (int i = 0; i < I; ++i)
    for (int j = 1; j <= grid.n_x(); ++j) out.initial(i, j) = data.g[i](0.0, grid.space_node(j), l);
  out.a_floor = data.a_floor;
  out.alpha_floor = data.alpha_floor;
  return out;
}

namespace {

FieldSeries psi_plane(const ProblemData& data, const GridSpec& grid) {
  const double K = grid.l_max();
  FieldSeries out;
  out.reserve(grid.n_t() + 1);
  for (int k = 0; k <= grid.n_t(); ++k) {
    const double t = grid.time_node(k);
    NetworkField u(grid.rays(), grid.n_x());
    u.junction() = data.psi[0](t, 0.0, K);
    for (int i = 0; i < grid.rays(); ++i)
      for (int j = 1; j <= grid.n_x(); ++j) u(i, j) = data.psi[i](t, grid.space_node(j), K);
    out.push_back(std::move(u));
  }
  return out;
}

double sampled_sup(const CoefficientField& field, const GridSpec& grid, bool over_x) {
  double sup = 0.0;
  for (int p = 0; p <= grid.n_l(); ++p)
    for (int k = 0; k <= grid.n_t(); ++k)
      for (int j = 0; j <= (over_x ? grid.n_x() : 0); ++j)
        sup = std::max(sup, std::abs(field(grid.time_node(k), grid.space_node(j), grid.level_node(p))));
  return sup;
}

}  // namespace

Trajectory solve_level(int p, std::span<const double> u_next_junction, const ProblemData& data, const GridSpec& grid,
                       Convection scheme, const BackwardOptions& options) {
  try {
    const double beta = options.naive_beta ? 0.0 : beta_at(p, data, grid);
    return march_classical(level_tables(p, u_next_junction, data, grid, beta), scheme);
  } catch (const SolverError& e) {
    throw SolverError("level " + std::to_string(p) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("level " + std::to_string(p) + ": " + e.what());
  }
}

SolutionCube run_backward(const ProblemData& data, const GridSpec& grid, Convection scheme,
                          const BackwardOptions& options) {
  check_shape(data);
  if (options.validate) {
    ValidationReport report = validate_assumptions(data, grid);
    if (!report.pass()) throw AssumptionViolation(std::move(report));
  }
  double r_sup = sampled_sup(data.r, grid, false);
  const double level_rate = 1.0 / grid.dl();
  if (level_rate < admissible_rate(r_sup)) {
    std::ostringstream msg;
    msg << "level rate 1/dl = " << level_rate << " below admissibility threshold " << admissible_rate(r_sup)
        << " (|r|_inf = " << r_sup << ")";
    throw std::invalid_argument(msg.str());
  }

  SolutionCube cube;
  cube.grid = grid;
  cube.levels.resize(grid.n_l() + 1);
  cube.levels[grid.n_l()] = psi_plane(data, grid);
  for (int p = grid.n_l() - 1; p >= 0; --p) {
    const std::vector<double> next = cube.junction_trace(p + 1);
    cube.levels[p] = solve_level(p, next, data, grid, scheme, options).fields;
  }
  return cube;
}

KirchhoffResidual kirchhoff_residual(const SolutionCube& cube, const ProblemData& data, const GridSpec& grid) {
  const int I = grid.rays();
  const int nt = grid.n_t();
  const int nl = grid.n_l();
  const double rate = 1.0 / grid.dl();
  KirchhoffResidual out;
  out.table = Eigen::MatrixXd::Zero(nl, nt + 1);
  for (int p = 0; p < nl; ++p) {
    const double l = grid.level_node(p);
    for (int k = 0; k <= nt; ++k) {
      const double t = grid.time_node(k);
      const NetworkField& u = cube.at(p, k);
      double flux = 0.0;
      for (int i = 0; i < I; ++i) flux += data.alpha[i](t, 0.0, l) * junction_derivative(u, i, grid.dx());
      const double res = rate * (cube.junction(p + 1, k) - u.junction()) + flux - data.r(t, 0.0, l) * u.junction() -
                         data.phi(t, 0.0, l);
      out.table(p, k) = res;
      out.sup = std::max(out.sup, std::abs(res));
      if (p <= nl - 2) out.sup_interior = std::max(out.sup_interior, std::abs(res));
    }
  }
  return out;
}

}  // namespace starnet
