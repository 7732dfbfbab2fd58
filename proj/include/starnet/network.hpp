#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace starnet {

/// I rays of common length R glued at a single junction vertex.
struct StarNetwork {
  int ray_count = 2;
  double ray_length = 1.0;

  StarNetwork() = default;
  StarNetwork(int rays, double length) : ray_count(rays), ray_length(length) {
    if (rays < 2) throw std::invalid_argument("star network needs at least 2 rays");
    if (!(length > 0.0)) throw std::invalid_argument("ray length must be positive");
  }
};

/// Uniform tensor grid over [0,T] x [0,R] x [0,K].
///
/// Spacings are computed once at construction; node coordinates are always
/// formed as index * extent / count so that the last node lands exactly on the
/// boundary.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(StarNetwork network, double horizon, double l_max, int n_t, int n_x, int n_l);

  const StarNetwork& network() const { return network_; }
  int rays() const { return network_.ray_count; }
  double ray_length() const { return network_.ray_length; }
  double horizon() const { return horizon_; }
  double l_max() const { return l_max_; }
  int n_t() const { return n_t_; }
  int n_x() const { return n_x_; }
  int n_l() const { return n_l_; }
  double dt() const { return dt_; }
  double dx() const { return dx_; }
  double dl() const { return dl_; }

  double time_node(int k) const { return k == n_t_ ? horizon_ : k * horizon_ / n_t_; }
  double space_node(int j) const { return j == n_x_ ? network_.ray_length : j * network_.ray_length / n_x_; }
  double level_node(int p) const { return p == n_l_ ? l_max_ : p * l_max_ / n_l_; }

  std::vector<double> time_nodes() const;
  std::vector<double> space_nodes() const;
  std::vector<double> level_nodes() const;

 private:
  StarNetwork network_;
  double horizon_ = 1.0;
  double l_max_ = 1.0;
  int n_t_ = 1;
  int n_x_ = 1;
  int n_l_ = 1;
  double dt_ = 1.0;
  double dx_ = 1.0;
  double dl_ = 1.0;
};

/// Admissibility floors for the step counts, expressed as minimal implicit
/// rates 1/dt and 1/dl (see bounds_certificates.hpp for how they are derived).
struct StepFloors {
  double min_time_rate = 0.0;
  double min_level_rate = 0.0;
};

/// Smallest admissible implicit rate for a zeroth-order coefficient bound s:
/// (floor(s) + 1) v s^2.
inline double admissible_rate(double s) { return std::max(std::floor(s) + 1.0, s * s); }

/// Validated grid construction. Rejects grids whose time rate n_t/T falls
/// below `floors.min_time_rate` (and likewise for the level rate).
GridSpec build_grid(const StarNetwork& network, double horizon, double l_max, int n_t, int n_x,
                    int n_l, const StepFloors& floors = {});

/// One scalar field on the network at fixed (t, l).
///
/// Storage is a single vector of size I*n_x + 1: slot 0 holds the junction
/// value, ray i node j >= 1 lives at 1 + i*n_x + (j-1). Every ray reads its
/// node 0 from slot 0, so continuity at the junction cannot be violated.
/// This ordering is also the unknown ordering of the arrow-banded system.
template <typename Scalar>
class BasicNetworkField {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicNetworkField() = default;
  BasicNetworkField(int rays, int n_x, Scalar fill = Scalar(0))
      : rays_(rays), n_x_(n_x), data_(Vector::Constant(rays * n_x + 1, fill)) {}
  BasicNetworkField(int rays, int n_x, Vector data) : rays_(rays), n_x_(n_x), data_(std::move(data)) {
    if (data_.size() != rays * n_x + 1) throw std::invalid_argument("network field size mismatch");
  }

  int rays() const { return rays_; }
  int n_x() const { return n_x_; }
  Eigen::Index size() const { return data_.size(); }

  Scalar junction() const { return data_(0); }
  Scalar& junction() { return data_(0); }

  Scalar operator()(int ray, int j) const { return j == 0 ? data_(0) : data_(offset(ray, j)); }
  Scalar& operator()(int ray, int j) { return j == 0 ? data_(0) : data_(offset(ray, j)); }

  /// Nodes j = 1..n_x of one ray.
  auto interior(int ray) { return data_.segment(1 + Eigen::Index(ray) * n_x_, n_x_); }
  auto interior(int ray) const { return data_.segment(1 + Eigen::Index(ray) * n_x_, n_x_); }

  /// Nodes j = 0..n_x of one ray, junction included.
  Vector ray_values(int ray) const {
    Vector out(n_x_ + 1);
    out(0) = data_(0);
    out.tail(n_x_) = interior(ray);
    return out;
  }

  const Vector& data() const { return data_; }
  Vector& data() { return data_; }

 private:
  Eigen::Index offset(int ray, int j) const { return 1 + Eigen::Index(ray) * n_x_ + (j - 1); }

  int rays_ = 0;
  int n_x_ = 0;
  Vector data_;
};

using NetworkField = BasicNetworkField<double>;

/// Time trajectory of network fields, k = 0..n_t.
using FieldSeries = std::vector<NetworkField>;

/// Full discrete solution of the local-time problem: levels[p][k] for
/// p = 0..n_l and k = 0..n_t.
struct SolutionCube {
  GridSpec grid;
  std::vector<FieldSeries> levels;

  const NetworkField& at(int p, int k) const { return levels.at(p).at(k); }
  double junction(int p, int k) const { return levels.at(p).at(k).junction(); }
  /// u^p(t_k, 0) for k = 0..n_t.
  std::vector<double> junction_trace(int p) const;
};

template <typename Scalar>
Scalar sup_norm(const BasicNetworkField<Scalar>& field) {
  return field.size() == 0 ? Scalar(0) : field.data().cwiseAbs().maxCoeff();
}

/// Best discrete Lipschitz constant: max over adjacent pairs of |diff| / spacing.
double lipschitz_seminorm(std::span<const double> samples, double spacing);

/// max over pairs (s, t) with |s - t| <= max_separation of
/// |f(s) - f(t)| / |s - t|^exponent, samples on a uniform grid.
double holder_quotient(std::span<const double> samples, double spacing, double exponent,
                       double max_separation = std::numeric_limits<double>::infinity());

/// Always true for NetworkField: the junction slot is shared.
template <typename Scalar>
bool junction_continuity_check(const BasicNetworkField<Scalar>&, double /*tol*/) {
  return true;
}

/// For externally supplied per-ray arrays (e.g. read back from CSV), where
/// node 0 of each ray is stored separately.
bool junction_continuity_check(std::span<const std::vector<double>> ray_values, double junction_value,
                               double tol);

}  // namespace starnet
