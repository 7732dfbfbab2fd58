#pragma once

#include "starnet/network.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace starnet {

enum class Convection { Centered, Upwind };

Convection parse_convection(const std::string& name);
const char* to_string(Convection scheme);

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Robin-Kirchhoff junction data at one time node:
/// -lambda u(0) + sum_i alpha_i d_x u_i(0) = gamma.
struct KirchhoffParams {
  double lambda = 0.0;
  Eigen::VectorXd alpha;
  double gamma = 0.0;
};

/// One implicit step: rate * (u - prev) - a u'' + b u' + c u = f on every ray,
/// Kirchhoff row at the junction, Neumann at x = R.
struct EllipticStepSpec {
  int rays = 2;
  int n_x = 2;
  double dx = 0.5;
  double rate = 1.0;  // 1/dt; the time index's implicit rate
  int time_index = 1;

  // Per ray, nodes j = 0..n_x.
  std::vector<Eigen::VectorXd> a, b, c, f;
  KirchhoffParams kirchhoff;
  NetworkField prev;

  double a_floor = 0.0;
  double alpha_floor = 0.0;
  double min_rate = 0.0;

  /// Uniform-coefficient step on `network` with n_x cells, mostly for tests.
  static EllipticStepSpec uniform(const StarNetwork& network, int n_x, double rate, double a, double b, double c,
                                  double f, KirchhoffParams kirchhoff, const NetworkField& prev);
};

/// Block system with one dense coupling row for the shared junction unknown.
///
/// Unknown ordering matches NetworkField: slot 0 is the junction, then each
/// ray's nodes j = 1..n_x. Ray rows are tridiagonal; `lower(0)` of each ray
/// multiplies the junction unknown. The junction row couples u(0) with the
/// first interior node of every ray only: the second neighbour of the
/// one-sided flux stencil is eliminated through the ray's first row, which
/// keeps the off-diagonal signs of an M-matrix.
template <typename Scalar>
struct ArrowBandedSystem {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  int rays = 0;
  int n_x = 0;
  std::vector<Vector> lower, diag, upper, rhs;  // per ray, length n_x
  Vector junction_coupling;                     // per ray
  Scalar junction_diag = Scalar(0);
  Scalar junction_rhs = Scalar(0);

  Eigen::Index dimension() const { return Eigen::Index(rays) * n_x + 1; }

  Eigen::SparseMatrix<Scalar> to_sparse() const {
    std::vector<Eigen::Triplet<Scalar>> entries;
    entries.reserve(static_cast<std::size_t>(3 * dimension() + rays));
    entries.emplace_back(0, 0, junction_diag);
    for (int i = 0; i < rays; ++i) {
      const Eigen::Index base = 1 + Eigen::Index(i) * n_x;
      entries.emplace_back(0, base, junction_coupling(i));
      for (int r = 0; r < n_x; ++r) {
        const Eigen::Index row = base + r;
        entries.emplace_back(row, r == 0 ? 0 : row - 1, lower[i](r));
        entries.emplace_back(row, row, diag[i](r));
        if (r + 1 < n_x) entries.emplace_back(row, row + 1, upper[i](r));
      }
    }
    Eigen::SparseMatrix<Scalar> m(dimension(), dimension());
    m.setFromTriplets(entries.begin(), entries.end());
    return m;
  }

  Vector rhs_vector() const {
    Vector out(dimension());
    out(0) = junction_rhs;
    for (int i = 0; i < rays; ++i) out.segment(1 + Eigen::Index(i) * n_x, n_x) = rhs[i];
    return out;
  }
};

namespace detail {

/// Thomas sweep for a tridiagonal block with two right-hand sides sharing
/// the factorisation.
template <typename Scalar>
void thomas_two_rhs(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& lower,
                    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& diag,
                    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& upper,
                    Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& z,
                    int ray) {
  const Eigen::Index n = diag.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> c_prime(n);
  Scalar pivot = diag(0);
  if (pivot == Scalar(0)) throw SolverError("zero pivot in ray block " + std::to_string(ray));
  c_prime(0) = n > 1 ? upper(0) / pivot : Scalar(0);
  y(0) /= pivot;
  z(0) /= pivot;
  for (Eigen::Index r = 1; r < n; ++r) {
    pivot = diag(r) - lower(r) * c_prime(r - 1);
    if (pivot == Scalar(0)) throw SolverError("zero pivot in ray block " + std::to_string(ray));
    c_prime(r) = r + 1 < n ? upper(r) / pivot : Scalar(0);
    y(r) = (y(r) - lower(r) * y(r - 1)) / pivot;
    z(r) = (z(r) - lower(r) * z(r - 1)) / pivot;
  }
  for (Eigen::Index r = n - 2; r >= 0; --r) {
    y(r) -= c_prime(r) * y(r + 1);
    z(r) -= c_prime(r) * z(r + 1);
  }
}

}  // namespace detail

/// Direct O(I * n_x) solve: each ray block is eliminated for its own data and
/// for a unit junction value, the junction row reduces to one scalar equation,
/// then rays are back-substituted.
template <typename Scalar>
BasicNetworkField<Scalar> solve_arrow_banded(const ArrowBandedSystem<Scalar>& system) {
  using Vector = typename ArrowBandedSystem<Scalar>::Vector;
  const int I = system.rays;
  const int n = system.n_x;
  std::vector<Vector> y(I), z(I);
  Scalar reduced_diag = system.junction_diag;
  Scalar reduced_rhs = system.junction_rhs;
  for (int i = 0; i < I; ++i) {
    y[i] = system.rhs[i];
    z[i] = Vector::Zero(n);
    z[i](0) = -system.lower[i](0);
    detail::thomas_two_rhs(system.lower[i], system.diag[i], system.upper[i], y[i], z[i], i);
    reduced_diag += system.junction_coupling(i) * z[i](0);
    reduced_rhs -= system.junction_coupling(i) * y[i](0);
  }
  if (reduced_diag == Scalar(0) || !std::isfinite(static_cast<double>(reduced_diag)))
    throw SolverError("degenerate junction reduction");
  const Scalar u0 = reduced_rhs / reduced_diag;
  BasicNetworkField<Scalar> out(I, n);
  out.junction() = u0;
  for (int i = 0; i < I; ++i) out.interior(i) = y[i] + u0 * z[i];
  return out;
}

ArrowBandedSystem<double> assemble_step(const EllipticStepSpec& spec, Convection scheme);

struct EllipticResidual {
  double interior_sup = 0.0;
  double kirchhoff_abs = 0.0;
  double neumann_abs = 0.0;
  double max() const { return std::max({interior_sup, kirchhoff_abs, neumann_abs}); }
};

/// Residuals of the discrete equations (junction row in its original
/// three-point form) evaluated at `field`.
EllipticResidual elliptic_residual(const NetworkField& field, const EllipticStepSpec& spec, Convection scheme);

/// d_x u_i(0) by the one-sided second-order stencil (-3 u0 + 4 u1 - u2) / (2 dx).
inline double junction_derivative(const NetworkField& field, int ray, double dx) {
  return (-3.0 * field.junction() + 4.0 * field(ray, 1) - field(ray, 2)) / (2.0 * dx);
}

}  // namespace starnet
