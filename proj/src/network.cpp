#include "starnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace starnet {

GridSpec::GridSpec(StarNetwork network, double horizon, double l_max, int n_t, int n_x, int n_l)
    : network_(network), horizon_(horizon), l_max_(l_max), n_t_(n_t), n_x_(n_x), n_l_(n_l) {
  if (!(horizon > 0.0) || !(l_max > 0.0)) throw std::invalid_argument("grid extents T and K must be positive");
  if (n_t < 1 || n_x < 2 || n_l < 1)
    throw std::invalid_argument("grid needs n_t >= 1, n_x >= 2, n_l >= 1");
  dt_ = horizon_ / n_t_;
  dx_ = network_.ray_length / n_x_;
  dl_ = l_max_ / n_l_;
}

std::vector<double> GridSpec::time_nodes() const {
  std::vector<double> out(n_t_ + 1);
  for (int k = 0; k <= n_t_; ++k) out[k] = time_node(k);
  return out;
}

std::vector<double> GridSpec::space_nodes() const {
  std::vector<double> out(n_x_ + 1);
  for (int j = 0; j <= n_x_; ++j) out[j] = space_node(j);
  return out;
}

std::vector<double> GridSpec::level_nodes() const {
  std::vector<double> out(n_l_ + 1);
  for (int p = 0; p <= n_l_; ++p) out[p] = level_node(p);
  return out;
}

GridSpec build_grid(const StarNetwork& network, double horizon, double l_max, int n_t, int n_x, int n_l,
                    const StepFloors& floors) {
  if (n_t <= 0 || n_x <= 0 || n_l <= 0) throw std::invalid_argument("grid counts must be positive");
  if (n_t / horizon < floors.min_time_rate) {
    std::ostringstream msg;
    msg << "n_t below admissibility threshold: need n_t/T >= (floor(|c|_inf)+1) v |c|_inf^2 = "
        << floors.min_time_rate << ", got n_t=" << n_t << " with T=" << horizon;
    throw std::invalid_argument(msg.str());
  }
  if (n_l / l_max < floors.min_level_rate) {
    std::ostringstream msg;
    msg << "n_l below admissibility threshold: need n_l/K >= (floor(|r|_inf)+1) v |r|_inf^2 = "
        << floors.min_level_rate << ", got n_l=" << n_l << " with K=" << l_max;
    throw std::invalid_argument(msg.str());
  }
  return GridSpec(network, horizon, l_max, n_t, n_x, n_l);
}

std::vector<double> SolutionCube::junction_trace(int p) const {
  const auto& series = levels.at(p);
  std::vector<double> out(series.size());
  std::transform(series.begin(), series.end(), out.begin(), [](const NetworkField& f) { return f.junction(); });
  return out;
}

double lipschitz_seminorm(std::span<const double> samples, double spacing) {
  if (samples.size() < 2) throw std::invalid_argument("lipschitz_seminorm needs at least 2 samples");
  if (!(spacing > 0.0)) throw std::invalid_argument("lipschitz_seminorm needs positive spacing");
  double best = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i)
    best = std::max(best, std::abs(samples[i] - samples[i - 1]) / spacing);
  return best;
}

double holder_quotient(std::span<const double> samples, double spacing, double exponent, double max_separation) {
  if (samples.size() < 2) throw std::invalid_argument("holder_quotient needs at least 2 samples");
  if (!(spacing > 0.0)) throw std::invalid_argument("holder_quotient needs positive spacing");
  if (!(exponent > 0.0) || exponent > 1.0) throw std::invalid_argument("holder exponent must lie in (0,1]");
  const std::size_t n = samples.size();
  // Separation |s - t| = d * spacing only depends on the index gap d.
  std::size_t max_gap = n - 1;
  if (std::isfinite(max_separation))
    max_gap = std::min<std::size_t>(max_gap, static_cast<std::size_t>(std::floor(max_separation / spacing + 1e-9)));
  double best = 0.0;
  for (std::size_t d = 1; d <= max_gap; ++d) {
    const double denom = std::pow(d * spacing, exponent);
    double gap_max = 0.0;
    for (std::size_t i = 0; i + d < n; ++i) gap_max = std::max(gap_max, std::abs(samples[i + d] - samples[i]));
    best = std::max(best, gap_max / denom);
  }
  return best;
}

bool junction_continuity_check(std::span<const std::vector<double>> ray_values, double junction_value, double tol) {
  double worst = 0.0;
  for (const auto& ray : ray_values) {
    if (ray.empty()) return false;
    worst = std::max(worst, std::abs(ray.front() - junction_value));
  }
  return worst <= tol;
}

}  // namespace starnet
