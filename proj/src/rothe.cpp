#include "starnet/rothe.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace starnet {

ClassicalTables sample_classical(const ClassicalProblemData& data, const GridSpec& grid) {
  check_shape(data);
  const int I = grid.rays();
  const int nt = grid.n_t();
  const int nx = grid.n_x();
  ClassicalTables out;
  out.grid = grid;
  out.a.assign(I, Eigen::MatrixXd(nt + 1, nx + 1));
  out.b = out.a;
  out.c = out.a;
  out.f = out.a;
  out.alpha.resize(nt + 1, I);
  out.lambda.resize(nt + 1);
  out.gamma.resize(nt + 1);
  for (int k = 0; k <= nt; ++k) {
    const double t = grid.time_node(k);
    for (int i = 0; i < I; ++i) {
      for (int j = 0; j <= nx; ++j) {
        const double x = grid.space_node(j);
        out.a[i](k, j) = data.a[i](t, x, 0.0);
        out.b[i](k, j) = data.b[i](t, x, 0.0);
        out.c[i](k, j) = data.c[i](t, x, 0.0);
        out.f[i](k, j) = data.f[i](t, x, 0.0);
      }
      out.alpha(k, i) = data.alpha[i](t, 0.0, 0.0);
    }
    out.lambda(k) = data.lambda(t, 0.0, 0.0);
    out.gamma(k) = data.gamma(t, 0.0, 0.0);
  }
  out.initial = NetworkField(I, nx);
  out.initial.junction() = data.g[0](0.0, 0.0, 0.0);
  for (int i = 0; i < I; ++i)
    for (int j = 1; j <= nx; ++j) out.initial(i, j) = data.g[i](0.0, grid.space_node(j), 0.0);
  out.a_floor = data.a_floor;
  out.alpha_floor = data.alpha_floor;

  auto finite = [](const auto& m) { return m.allFinite(); };
  bool ok = finite(out.alpha) && finite(out.lambda) && finite(out.gamma) && finite(out.initial.data());
  for (int i = 0; i < I; ++i) ok = ok && finite(out.a[i]) && finite(out.b[i]) && finite(out.c[i]) && finite(out.f[i]);
  if (!ok) throw std::domain_error("non-finite coefficient in classical problem '" + data.name + "'");
  return out;
}

Trajectory march_classical(const ClassicalTables& tables, Convection scheme) {
  const GridSpec& grid = tables.grid;
  const int I = grid.rays();
  const int nt = grid.n_t();
  const int nx = grid.n_x();

  double c_sup = 0.0;
  for (const auto& c : tables.c) c_sup = std::max(c_sup, c.cwiseAbs().maxCoeff());
  const double rate = 1.0 / grid.dt();
  const double min_rate = admissible_rate(c_sup);
  if (rate < min_rate) {
    std::ostringstream msg;
    msg << "time rate 1/dt = " << rate << " below admissibility threshold " << min_rate << " (|c|_inf = " << c_sup
        << ")";
    throw std::invalid_argument(msg.str());
  }

  Trajectory traj;
  traj.grid = grid;
  traj.fields.reserve(nt + 1);
  traj.fields.push_back(tables.initial);

  EllipticStepSpec spec;
  spec.rays = I;
  spec.n_x = nx;
  spec.dx = grid.dx();
  spec.rate = rate;
  spec.min_rate = min_rate;
  spec.a_floor = tables.a_floor;
  spec.alpha_floor = tables.alpha_floor;
  spec.a.resize(I);
  spec.b.resize(I);
  spec.c.resize(I);
  spec.f.resize(I);
  for (int k = 1; k <= nt; ++k) {
    spec.time_index = k;
    for (int i = 0; i < I; ++i) {
      spec.a[i] = tables.a[i].row(k).transpose();
      spec.b[i] = tables.b[i].row(k).transpose();
      spec.c[i] = tables.c[i].row(k).transpose();
      spec.f[i] = tables.f[i].row(k).transpose();
    }
    spec.kirchhoff.lambda = tables.lambda(k);
    spec.kirchhoff.alpha = tables.alpha.row(k).transpose();
    spec.kirchhoff.gamma = tables.gamma(k);
    spec.prev = traj.fields.back();
    try {
      traj.fields.push_back(solve_arrow_banded(assemble_step(spec, scheme)));
    } catch (const SolverError& e) {
      throw SolverError("step " + std::to_string(k) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("step " + std::to_string(k) + ": " + e.what());
    }
  }
  return traj;
}

Trajectory march_classical(const ClassicalProblemData& data, const GridSpec& grid, Convection scheme) {
  ValidationReport report = validate_classical(data, grid);
  if (!report.pass()) throw AssumptionViolation(std::move(report));
  return march_classical(sample_classical(data, grid), scheme);
}

NetworkField interpolant_v(const Trajectory& traj, double t) {
  const GridSpec& grid = traj.grid;
  if (!(t >= 0.0 && t <= grid.horizon())) throw std::out_of_range("interpolant_v: t outside [0, T]");
  const int nt = grid.n_t();
  int k = std::min(nt - 1, static_cast<int>(std::floor(t / grid.dt())));
  const double t0 = grid.time_node(k);
  const double t1 = grid.time_node(k + 1);
  const double w = (t - t0) / (t1 - t0);
  if (w == 0.0) return traj.fields[k];
  if (w == 1.0) return traj.fields[k + 1];
  NetworkField out = traj.fields[k];
  out.data() = (1.0 - w) * traj.fields[k].data() + w * traj.fields[k + 1].data();
  return out;
}

TimeDerivativeNorms discrete_time_derivative(const Trajectory& traj) {
  if (traj.fields.size() < 2) throw std::invalid_argument("discrete_time_derivative needs at least two fields");
  const double rate = 1.0 / traj.grid.dt();
  TimeDerivativeNorms out;
  for (std::size_t k = 1; k < traj.fields.size(); ++k) {
    const auto& cur = traj.fields[k];
    const auto& prev = traj.fields[k - 1];
    out.field_sup.push_back(rate * (cur.data() - prev.data()).cwiseAbs().maxCoeff());
    out.junction.push_back(rate * std::abs(cur.junction() - prev.junction()));
  }
  out.field_max = *std::max_element(out.field_sup.begin(), out.field_sup.end());
  out.junction_max = *std::max_element(out.junction.begin(), out.junction.end());
  return out;
}

double max_interior_gradient(const FieldSeries& fields, double dx) {
  double best = 0.0;
  for (const auto& u : fields)
    for (int i = 0; i < u.rays(); ++i)
      for (int j = 1; j < u.n_x(); ++j) best = std::max(best, std::abs(u(i, j + 1) - u(i, j - 1)) / (2.0 * dx));
  return best;
}

}  // namespace starnet
