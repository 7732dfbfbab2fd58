#include "starnet/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace starnet {

Convection parse_convection(const std::string& name) {
  if (name == "upwind") return Convection::Upwind;
  if (name == "centered") return Convection::Centered;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected upwind or centered)");
}

const char* to_string(Convection scheme) { return scheme == Convection::Upwind ? "upwind" : "centered"; }

EllipticStepSpec EllipticStepSpec::uniform(const StarNetwork& network, int n_x, double rate, double a, double b,
                                           double c, double f, KirchhoffParams kirchhoff, const NetworkField& prev) {
  EllipticStepSpec spec;
  spec.rays = network.ray_count;
  spec.n_x = n_x;
  spec.dx = network.ray_length / n_x;
  spec.rate = rate;
  spec.a.assign(spec.rays, Eigen::VectorXd::Constant(n_x + 1, a));
  spec.b.assign(spec.rays, Eigen::VectorXd::Constant(n_x + 1, b));
  spec.c.assign(spec.rays, Eigen::VectorXd::Constant(n_x + 1, c));
  spec.f.assign(spec.rays, Eigen::VectorXd::Constant(n_x + 1, f));
  spec.kirchhoff = std::move(kirchhoff);
  spec.prev = prev;
  spec.a_floor = a;
  spec.alpha_floor = spec.kirchhoff.alpha.size() ? spec.kirchhoff.alpha.minCoeff() : 0.0;
  return spec;
}

namespace {

void validate(const EllipticStepSpec& spec) {
  std::ostringstream err;
  if (spec.rays < 2 || spec.n_x < 2) err << "step needs >= 2 rays and n_x >= 2; ";
  if (spec.rate < spec.min_rate)
    err << "step " << spec.time_index << ": rate " << spec.rate << " below admissibility threshold " << spec.min_rate
        << "; ";
  auto sized = [&](const std::vector<Eigen::VectorXd>& v, const char* name) {
    if (static_cast<int>(v.size()) != spec.rays) {
      err << name << " table needs one column per ray; ";
      return;
    }
    for (const auto& col : v) {
      if (col.size() != spec.n_x + 1) err << name << " table has wrong length; ";
      if (!col.allFinite()) err << "non-finite " << name << " table entry; ";
    }
  };
  sized(spec.a, "a");
  sized(spec.b, "b");
  sized(spec.c, "c");
  sized(spec.f, "f");
  if (spec.kirchhoff.alpha.size() != spec.rays) err << "alpha needs one entry per ray; ";
  if (spec.prev.rays() != spec.rays || spec.prev.n_x() != spec.n_x) err << "previous field has wrong shape; ";
  const std::string so_far = err.str();
  if (!so_far.empty()) throw std::invalid_argument(so_far);

  for (int i = 0; i < spec.rays; ++i)
    if (spec.a[i].minCoeff() < spec.a_floor)
      err << "a below ellipticity floor on ray " << i << "; ";
  if (spec.kirchhoff.alpha.minCoeff() < spec.alpha_floor) err << "alpha below floor; ";
  if (!std::isfinite(spec.kirchhoff.lambda) || !std::isfinite(spec.kirchhoff.gamma) || !spec.kirchhoff.alpha.allFinite())
    err << "non-finite Kirchhoff data; ";
  if (!spec.prev.data().allFinite()) err << "non-finite previous field; ";
  const std::string msg = err.str();
  if (!msg.empty()) throw std::invalid_argument(msg);
}

// Coefficients of one interior row: lower * u_{j-1} + diag * u_j + upper * u_{j+1}.
struct Stencil {
  double lower, diag, upper;
};

Stencil interior_stencil(double a, double b, double c, double rate, double dx, Convection scheme) {
  const double diffusion = a / (dx * dx);
  Stencil s{-diffusion, 2.0 * diffusion + rate + c, -diffusion};
  if (scheme == Convection::Centered) {
    s.lower -= b / (2.0 * dx);
    s.upper += b / (2.0 * dx);
  } else {
    const double bp = std::max(b, 0.0);
    const double bm = std::min(b, 0.0);
    s.lower -= bp / dx;
    s.diag += (bp - bm) / dx;
    s.upper += bm / dx;
  }
  return s;
}

// Ghost node u_{n+1} = u_{n-1}; convection vanishes with the derivative.
Stencil neumann_stencil(double a, double c, double rate, double dx) {
  const double diffusion = a / (dx * dx);
  return {-2.0 * diffusion, 2.0 * diffusion + rate + c, 0.0};
}

}  // namespace

ArrowBandedSystem<double> assemble_step(const EllipticStepSpec& spec, Convection scheme) {
  validate(spec);
  const int I = spec.rays;
  const int n = spec.n_x;
  const double dx = spec.dx;

  ArrowBandedSystem<double> sys;
  sys.rays = I;
  sys.n_x = n;
  sys.lower.assign(I, Eigen::VectorXd::Zero(n));
  sys.diag = sys.lower;
  sys.upper = sys.lower;
  sys.rhs = sys.lower;
  sys.junction_coupling = Eigen::VectorXd::Zero(I);

  // Junction row negated so its diagonal is positive:
  // (lambda + 3S) u0 - sum 4 s_i u_{i,1} + sum s_i u_{i,2} = -gamma, s_i = alpha_i / (2 dx).
  double junction_diag = spec.kirchhoff.lambda;
  double junction_rhs = -spec.kirchhoff.gamma;

  for (int i = 0; i < I; ++i) {
    for (int j = 1; j <= n; ++j) {
      const Stencil s = j < n ? interior_stencil(spec.a[i](j), spec.b[i](j), spec.c[i](j), spec.rate, dx, scheme)
                              : neumann_stencil(spec.a[i](j), spec.c[i](j), spec.rate, dx);
      sys.lower[i](j - 1) = s.lower;
      sys.diag[i](j - 1) = s.diag;
      sys.upper[i](j - 1) = s.upper;
      sys.rhs[i](j - 1) = spec.f[i](j) + spec.rate * spec.prev(i, j);
    }

    // Eliminate u_{i,2} with the ray's first row L u0 + D u1 + U u2 = rhs1.
    const double si = spec.kirchhoff.alpha(i) / (2.0 * dx);
    const double L = sys.lower[i](0);
    const double D = sys.diag[i](0);
    const double U = sys.upper[i](0);
    if (U == 0.0) throw SolverError("degenerate junction stencil on ray " + std::to_string(i));
    junction_diag += 3.0 * si - si * L / U;
    sys.junction_coupling(i) = -4.0 * si - si * D / U;
    junction_rhs -= si * sys.rhs[i](0) / U;
  }
  sys.junction_diag = junction_diag;
  sys.junction_rhs = junction_rhs;
  return sys;
}

EllipticResidual elliptic_residual(const NetworkField& field, const EllipticStepSpec& spec, Convection scheme) {
  EllipticResidual res;
  const int n = spec.n_x;
  const double dx = spec.dx;
  double flux = 0.0;
  for (int i = 0; i < spec.rays; ++i) {
    for (int j = 1; j < n; ++j) {
      const Stencil s = interior_stencil(spec.a[i](j), spec.b[i](j), spec.c[i](j), spec.rate, dx, scheme);
      const double lhs = s.lower * field(i, j - 1) + s.diag * field(i, j) + s.upper * field(i, j + 1);
      const double rhs = spec.f[i](j) + spec.rate * spec.prev(i, j);
      res.interior_sup = std::max(res.interior_sup, std::abs(lhs - rhs));
    }
    const Stencil s = neumann_stencil(spec.a[i](n), spec.c[i](n), spec.rate, dx);
    const double lhs = s.lower * field(i, n - 1) + s.diag * field(i, n);
    res.neumann_abs = std::max(res.neumann_abs, std::abs(lhs - spec.f[i](n) - spec.rate * spec.prev(i, n)));
    flux += spec.kirchhoff.alpha(i) * junction_derivative(field, i, dx);
  }
  res.kirchhoff_abs = std::abs(-spec.kirchhoff.lambda * field.junction() + flux - spec.kirchhoff.gamma);
  return res;
}

}  // namespace starnet
