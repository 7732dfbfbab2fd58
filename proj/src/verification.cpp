#include "starnet/verification.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <sstream>

namespace starnet {

ManufacturedCase manufactured_cosine(const CosineSpec& spec) {
  if (!spec.h || !spec.h_prime) throw std::invalid_argument("manufactured_cosine needs h and h'");
  const double K = spec.l_max;
  if (std::abs(spec.h(K) - 1.0) > 1e-12)
    throw std::invalid_argument("manufactured_cosine: h(K) must equal 1 (Dirichlet compatibility)");
  const double R = spec.network.ray_length;
  const double k = std::numbers::pi / R;
  const int I = spec.network.ray_count;
  auto h = spec.h;
  auto hp = spec.h_prime;

  ManufacturedCase mc;
  ProblemData& d = mc.data;
  d.name = "manufactured_cosine";
  d.network = spec.network;
  d.horizon = spec.horizon;
  d.l_max = K;
  d.a_floor = spec.a_floor;
  d.alpha_floor = spec.alpha_floor;

  auto u = [h, k](double t, double x, double l) { return std::exp(-t) * std::cos(k * x) * h(l); };
  const CoefficientField a = spec.a, b = spec.b, c = spec.c, r = spec.r;
  auto f = [=](double t, double x, double l) {
    const double ux = -k * std::exp(-t) * std::sin(k * x) * h(l);
    return u(t, x, l) * (-1.0 + a(t, x, l) * k * k + c(t, x, l)) + b(t, x, l) * ux;
  };
  auto phi = [=](double t, double, double l) { return std::exp(-t) * (hp(l) - r(t, 0.0, l) * h(l)); };
  auto psi = [=](double t, double x, double) { return u(t, x, K); };
  auto g = [=](double, double x, double l) { return u(0.0, x, l); };

  const std::string ansatz = "exp(-t)*cos(pi*x/R)*" + spec.h_description;
  for (int i = 0; i < I; ++i) {
    d.a.push_back(a);
    d.b.push_back(b);
    d.c.push_back(c);
    d.f.push_back(CoefficientField::from_function(f, "manufactured source"));
    d.alpha.push_back(CoefficientField::constant(spec.alpha));
    d.psi.push_back(CoefficientField::from_function(psi, "u(t, x, K)"));
    d.g.push_back(CoefficientField::from_function(g, "u(0, x, l)"));
  }
  d.r = r;
  d.phi = CoefficientField::from_function(phi, "manufactured junction source");
  d.g_l_junction = CoefficientField::from_function([hp](double, double, double l) { return hp(l); }, "h'(l)");
  RayFields exact(I, CoefficientField::from_function(u, ansatz));
  d.exact = exact;
  mc.description = ansatz;
  return mc;
}

namespace {

void accumulate(ErrorNorms& acc, double& sum_sq, std::size_t& count, const NetworkField& u, const RayFields& exact,
                const GridSpec& grid, double t, double l) {
  auto add = [&](double diff) {
    acc.sup = std::max(acc.sup, std::abs(diff));
    sum_sq += diff * diff;
    ++count;
  };
  add(u.junction() - exact[0](t, 0.0, l));
  for (int i = 0; i < u.rays(); ++i)
    for (int j = 1; j <= u.n_x(); ++j) add(u(i, j) - exact[i](t, grid.space_node(j), l));
}

}  // namespace

ErrorNorms error_norms(const SolutionCube& cube, const RayFields& exact) {
  const GridSpec& grid = cube.grid;
  if (static_cast<int>(exact.size()) != grid.rays()) throw std::invalid_argument("exact solution needs one entry per ray");
  ErrorNorms out;
  double sum_sq = 0.0;
  std::size_t count = 0;
  for (int p = 0; p <= grid.n_l(); ++p)
    for (int k = 0; k <= grid.n_t(); ++k)
      accumulate(out, sum_sq, count, cube.at(p, k), exact, grid, grid.time_node(k), grid.level_node(p));
  out.rms = std::sqrt(sum_sq / static_cast<double>(count));
  return out;
}

ErrorNorms error_norms(const Trajectory& traj, const RayFields& exact) {
  const GridSpec& grid = traj.grid;
  if (static_cast<int>(exact.size()) != grid.rays()) throw std::invalid_argument("exact solution needs one entry per ray");
  ErrorNorms out;
  double sum_sq = 0.0;
  std::size_t count = 0;
  for (int k = 0; k <= grid.n_t(); ++k)
    accumulate(out, sum_sq, count, traj.fields[k], exact, grid, grid.time_node(k), 0.0);
  out.rms = std::sqrt(sum_sq / static_cast<double>(count));
  return out;
}

double convergence_order(std::span<const double> errors, std::span<const double> spacings) {
  if (errors.size() != spacings.size()) throw std::invalid_argument("errors and spacings differ in length");
  if (errors.size() < 3) throw std::invalid_argument("convergence_order needs at least 3 points");
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || !(spacings[i] > 0.0))
      throw std::invalid_argument("convergence_order needs positive errors and spacings");
    if (i > 0 && !(spacings[i] < spacings[i - 1]))
      throw std::invalid_argument("spacings must be strictly decreasing");
  }
  const std::size_t n = errors.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(spacings[i]);
    my += std::log(errors[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(spacings[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

const char* to_string(RefineAxis axis) {
  switch (axis) {
    case RefineAxis::Time: return "t";
    case RefineAxis::Space: return "x";
    case RefineAxis::Level: return "l";
  }
  return "?";
}

double cube_distance(const SolutionCube& coarse, const SolutionCube& fine) {
  const GridSpec& c = coarse.grid;
  const GridSpec& f = fine.grid;
  auto ratio = [](int fine_count, int coarse_count) {
    if (fine_count % coarse_count != 0) throw std::invalid_argument("cube_distance: grids are not nested");
    return fine_count / coarse_count;
  };
  const int st = ratio(f.n_t(), c.n_t());
  const int sx = ratio(f.n_x(), c.n_x());
  const int sl = ratio(f.n_l(), c.n_l());
  double worst = 0.0;
  for (int p = 0; p <= c.n_l(); ++p)
    for (int k = 0; k <= c.n_t(); ++k) {
      const NetworkField& u = coarse.at(p, k);
      const NetworkField& v = fine.at(p * sl, k * st);
      worst = std::max(worst, std::abs(u.junction() - v.junction()));
      for (int i = 0; i < c.rays(); ++i)
        for (int j = 1; j <= c.n_x(); ++j) worst = std::max(worst, std::abs(u(i, j) - v(i, j * sx)));
    }
  return worst;
}

SweepResult refinement_sweep(const ProblemData& data, RefineAxis axis, GridCounts base, GridCounts held, int runs,
                             Convection scheme, int reference_factor, int threads) {
  if (runs < 3) throw std::invalid_argument("refinement_sweep needs at least 3 runs");
  if (reference_factor < 2) throw std::invalid_argument("refinement_sweep needs a reference factor >= 2");
  SweepResult out;
  out.axis = axis;
  auto scaled = [&](int factor) {
    GridCounts g = held;
    switch (axis) {
      case RefineAxis::Time: g.n_t = base.n_t * factor; break;
      case RefineAxis::Space: g.n_x = base.n_x * factor; break;
      case RefineAxis::Level: g.n_l = base.n_l * factor; break;
    }
    return g;
  };
  for (int m = 0; m < runs; ++m) out.grids.push_back(scaled(1 << m));
  out.reference = scaled((1 << (runs - 1)) * reference_factor);

  // Slot `runs` holds the reference.
  std::vector<SolutionCube> cubes(runs + 1);
  auto run_one = [&](int m) {
    const GridCounts& g = m == runs ? out.reference : out.grids[m];
    const GridSpec grid(data.network, data.horizon, data.l_max, g.n_t, g.n_x, g.n_l);
    cubes[m] = run_backward(data, grid, scheme);
  };
  const int workers = std::max(1, threads);
  for (int start = 0; start <= runs; start += workers) {
    std::vector<std::future<void>> batch;
    for (int m = start; m <= std::min(runs, start + workers - 1); ++m)
      batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, run_one, m));
    for (auto& f : batch) f.get();
  }

  for (int m = 0; m < runs; ++m) {
    const GridSpec& grid = cubes[m].grid;
    out.spacings.push_back(axis == RefineAxis::Time ? grid.dt() : axis == RefineAxis::Space ? grid.dx() : grid.dl());
    out.errors.push_back(cube_distance(cubes[m], cubes[runs]));
    if (data.exact) out.exact_errors.push_back(error_norms(cubes[m], *data.exact).sup);
  }
  out.order = convergence_order(out.errors, out.spacings);
  return out;
}

namespace {

CoefficientField shifted(const CoefficientField& base, const CoefficientField& by, double sign, const char* what) {
  return CoefficientField::from_function(
      [base, by, sign](double t, double x, double l) { return base(t, x, l) + sign * by(t, x, l); }, what);
}

void record(ComparisonResult& out, const NetworkField& base, const NetworkField& perturbed, int p, int k) {
  Eigen::Index idx = 0;
  const double worst = (base.data() - perturbed.data()).maxCoeff(&idx);
  if (worst > out.worst_violation) {
    out.worst_violation = worst;
    std::ostringstream os;
    if (p >= 0) os << "level " << p << ", ";
    os << "step " << k << ", slot " << idx;
    out.where = os.str();
  }
}

}  // namespace

ComparisonResult comparison_test(const ProblemData& data, const GridSpec& grid, const CoefficientField& bump,
                                 const CoefficientField& drop) {
  const SolutionCube base = run_backward(data, grid, Convection::Upwind);
  ProblemData raised = data;
  for (auto& f : raised.f) f = shifted(f, bump, 1.0, "f + bump");
  raised.phi = shifted(raised.phi, drop, -1.0, "phi - drop");
  // Lowering phi breaks the corner compatibility on purpose.
  BackwardOptions options;
  options.validate = false;
  const SolutionCube perturbed = run_backward(raised, grid, Convection::Upwind, options);

  ComparisonResult out;
  for (int p = 0; p <= grid.n_l(); ++p)
    for (int k = 0; k <= grid.n_t(); ++k) record(out, base.at(p, k), perturbed.at(p, k), p, k);
  out.pass = out.worst_violation <= 1e-10;
  return out;
}

ComparisonResult comparison_test(const ClassicalProblemData& data, const GridSpec& grid,
                                 const CoefficientField& bump, const CoefficientField& drop) {
  const Trajectory base = march_classical(data, grid, Convection::Upwind);
  ClassicalProblemData raised = data;
  for (auto& f : raised.f) f = shifted(f, bump, 1.0, "f + bump");
  raised.gamma = shifted(raised.gamma, drop, -1.0, "gamma - drop");
  const Trajectory perturbed = march_classical(sample_classical(raised, grid), Convection::Upwind);

  ComparisonResult out;
  for (int k = 0; k <= grid.n_t(); ++k) record(out, base.fields[k], perturbed.fields[k], -1, k);
  out.pass = out.worst_violation <= 1e-10;
  return out;
}

const char* to_string(InterpolationStatement::Status status) {
  switch (status) {
    case InterpolationStatement::Status::Pass: return "pass";
    case InterpolationStatement::Status::Fail: return "fail";
    case InterpolationStatement::Status::Vacuous: return "vacuous";
  }
  return "?";
}

double interpolation_constant(double nu, double nu3, double gamma) {
  return 2.0 * nu3 * std::pow(nu / (gamma * nu3), gamma / (1.0 + gamma)) +
         2.0 * nu * std::pow(gamma * nu3 / nu, -1.0 / (1.0 + gamma));
}

InterpolationCheck holder_interpolation_check(const SolutionCube& cube, double alpha, double beta, double gamma,
                                              double tol) {
  const GridSpec& grid = cube.grid;
  const int I = grid.rays();
  const int nt = grid.n_t();
  const int nx = grid.n_x();
  const int nl = grid.n_l();
  const double dx = grid.dx();
  constexpr double kVacuous = 1e-8;

  InterpolationCheck out;
  std::vector<double> series;

  // nu1, nu2: Holder quotients of u in t and in l at every (ray, node).
  for (int i = 0; i < I; ++i)
    for (int j = 0; j <= nx; ++j) {
      for (int p = 0; p <= nl; ++p) {
        series.resize(nt + 1);
        for (int k = 0; k <= nt; ++k) series[k] = cube.at(p, k)(i, j);
        out.nu1 = std::max(out.nu1, holder_quotient(series, grid.dt(), alpha, 1.0));
      }
      for (int k = 0; k <= nt; ++k) {
        series.resize(nl + 1);
        for (int p = 0; p <= nl; ++p) series[p] = cube.at(p, k)(i, j);
        out.nu2 = std::max(out.nu2, holder_quotient(series, grid.dl(), beta, 1.0));
      }
    }

  // d_x u at cell midpoints, indexed [p][k][i][j], j = 0..n_x-1.
  auto ux = [&](int p, int k, int i, int j) { return (cube.at(p, k)(i, j + 1) - cube.at(p, k)(i, j)) / dx; };
  for (int p = 0; p <= nl; ++p)
    for (int k = 0; k <= nt; ++k)
      for (int i = 0; i < I; ++i) {
        series.resize(nx);
        for (int j = 0; j < nx; ++j) series[j] = ux(p, k, i, j);
        if (nx >= 2) out.nu3 = std::max(out.nu3, holder_quotient(series, dx, gamma));
      }

  const double et = alpha * gamma / (1.0 + gamma);
  const double el = beta * gamma / (1.0 + gamma);
  out.time.exponent = et;
  out.level.exponent = el;
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < nx; ++j) {
      for (int p = 0; p <= nl; ++p) {
        series.resize(nt + 1);
        for (int k = 0; k <= nt; ++k) series[k] = ux(p, k, i, j);
        out.time.observed = std::max(out.time.observed, holder_quotient(series, grid.dt(), et, 1.0));
      }
      for (int k = 0; k <= nt; ++k) {
        series.resize(nl + 1);
        for (int p = 0; p <= nl; ++p) series[p] = ux(p, k, i, j);
        out.level.observed = std::max(out.level.observed, holder_quotient(series, grid.dl(), el, 1.0));
      }
    }

  auto judge = [&](InterpolationStatement& s, double nu) {
    if (nu <= kVacuous || out.nu3 <= kVacuous) {
      s.status = InterpolationStatement::Status::Vacuous;
      return;
    }
    s.bound = interpolation_constant(nu, out.nu3, gamma);
    s.status = s.observed <= s.bound * (1.0 + tol) ? InterpolationStatement::Status::Pass
                                                   : InterpolationStatement::Status::Fail;
  };
  judge(out.time, out.nu1);
  judge(out.level, out.nu2);
  return out;
}

}  // namespace starnet
