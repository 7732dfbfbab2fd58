#include <doctest.h>

#include "fixtures.hpp"
#include "starnet/verification.hpp"

#include <cmath>
#include <numbers>

using namespace starnet;

namespace {

SolutionCube cube_from(const GridSpec& grid, const std::function<double(double, double, double)>& u) {
  SolutionCube cube;
  cube.grid = grid;
  cube.levels.resize(grid.n_l() + 1);
  for (int p = 0; p <= grid.n_l(); ++p)
    for (int k = 0; k <= grid.n_t(); ++k) {
      NetworkField f(grid.rays(), grid.n_x());
      for (int i = 0; i < grid.rays(); ++i)
        for (int j = 0; j <= grid.n_x(); ++j) f(i, j) = u(grid.time_node(k), grid.space_node(j), grid.level_node(p));
      cube.levels[p].push_back(f);
    }
  return cube;
}

CosineSpec quadratic_spec() {
  CosineSpec s;
  s.h = [](double l) { return l * l; };
  s.h_prime = [](double l) { return 2.0 * l; };
  s.h_description = "l^2";
  s.b = CoefficientField::constant(0.5);
  s.c = CoefficientField::constant(1.0);
  s.r = CoefficientField::constant(0.2);
  return s;
}

}  // namespace

TEST_CASE("manufactured data for h = 1") {
  CosineSpec s;
  s.h = [](double) { return 1.0; };
  s.h_prime = [](double) { return 0.0; };
  const ManufacturedCase mc = manufactured_cosine(s);
  const double pi = std::numbers::pi;
  for (double t : {0.0, 0.4, 1.0})
    for (double x : {0.0, 0.3, 1.0}) {
      CHECK(mc.data.f[0](t, x, 0.5) == doctest::Approx((-1.0 + pi * pi) * std::exp(-t) * std::cos(pi * x)));
      CHECK(mc.data.phi(t, 0.0, 0.5) == 0.0);
    }
}

TEST_CASE("manufactured junction source for h = l^2") {
  CosineSpec s = quadratic_spec();
  s.r = CoefficientField::constant(0.0);
  const ManufacturedCase mc = manufactured_cosine(s);
  CHECK(mc.data.phi(0.3, 0.0, 0.6) == doctest::Approx(1.2 * std::exp(-0.3)));
}

TEST_CASE("manufactured data satisfies the assumptions and g equals the ansatz at t = 0") {
  const ManufacturedCase mc = manufactured_cosine(quadratic_spec());
  const GridSpec g(mc.data.network, 1.0, 1.0, 8, 64, 8);
  CHECK(validate_assumptions(mc.data, g).pass());
  for (int i = 0; i < 3; ++i)
    for (double x : {0.0, 0.25, 1.0})
      for (double l : {0.0, 0.5, 1.0}) CHECK(mc.data.g[i](0.0, x, l) == (*mc.data.exact)[i](0.0, x, l));
}

TEST_CASE("manufactured case rejects h(K) != 1") {
  CosineSpec s;
  s.h = [](double l) { return l; };
  s.h_prime = [](double) { return 1.0; };
  s.l_max = 2.0;
  CHECK_THROWS_AS(manufactured_cosine(s), std::invalid_argument);
}

TEST_CASE("error norms") {
  const ManufacturedCase mc = manufactured_cosine(quadratic_spec());
  const GridSpec g(mc.data.network, 1.0, 1.0, 4, 8, 4);
  const auto& exact = *mc.data.exact;
  const SolutionCube sampled = cube_from(g, [&](double t, double x, double l) { return exact[0](t, x, l); });
  CHECK(error_norms(sampled, exact).sup == 0.0);
  const SolutionCube shifted = cube_from(g, [&](double t, double x, double l) { return exact[0](t, x, l) + 1e-3; });
  CHECK(error_norms(shifted, exact).sup == doctest::Approx(1e-3));
  CHECK(error_norms(shifted, exact).rms == doctest::Approx(1e-3));

  const SolutionCube run = run_backward(mc.data, GridSpec(mc.data.network, 1.0, 1.0, 32, 64, 32), Convection::Centered);
  const double baseline = error_norms(run, exact).sup;
  CHECK(std::isfinite(baseline));
  CHECK(baseline > 0.0);
  CHECK(baseline < 1e-2);
}

TEST_CASE("convergence order on geometric data") {
  const std::vector<double> h{1.0, 0.5, 0.25};
  CHECK(convergence_order(std::vector<double>{0.1, 0.025, 0.00625}, h) == doctest::Approx(2.0));
  CHECK(convergence_order(std::vector<double>{0.1, 0.05, 0.025}, h) == doctest::Approx(1.0));
  CHECK(convergence_order(std::vector<double>{0.3, 0.3, 0.3}, h) == doctest::Approx(0.0));
  CHECK_THROWS_AS(convergence_order(std::vector<double>{0.1, 0.05}, std::vector<double>{1.0, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(convergence_order(std::vector<double>{0.1, 0.05, 0.02}, std::vector<double>{1.0, 1.0, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(convergence_order(std::vector<double>{0.1, 0.0, 0.02}, h), std::invalid_argument);
}

TEST_CASE("cube distance on nested grids") {
  const StarNetwork net(2, 1.0);
  const GridSpec coarse(net, 1.0, 1.0, 2, 4, 2);
  const GridSpec fine(net, 1.0, 1.0, 4, 8, 2);
  auto u = [](double t, double x, double l) { return t + x * x + l; };
  CHECK(cube_distance(cube_from(coarse, u), cube_from(fine, u)) == 0.0);
  CHECK(cube_distance(cube_from(coarse, u), cube_from(fine, [&](double t, double x, double l) {
          return u(t, x, l) + 0.5;
        })) == 0.5);
  CHECK_THROWS_AS(cube_distance(cube_from(fine, u), cube_from(coarse, u)), std::invalid_argument);
}

TEST_CASE("refinement sweep recovers the space order") {
  const ManufacturedCase mc = manufactured_cosine(quadratic_spec());
  const SweepResult sweep =
      refinement_sweep(mc.data, RefineAxis::Space, {8, 8, 8}, {8, 8, 8}, 3, Convection::Centered, 4, 2);
  REQUIRE(sweep.grids.size() == 3);
  CHECK(sweep.grids[2].n_x == 32);
  CHECK(sweep.reference.n_x == 128);
  CHECK(sweep.grids[1].n_t == 8);
  CHECK(sweep.exact_errors.size() == 3);
  CHECK(sweep.order == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("comparison examples") {
  const ProblemData one = fixtures::constant_problem();
  const GridSpec g(one.network, 1.0, 1.0, 8, 16, 8);
  const CoefficientField zero = CoefficientField::constant(0.0);
  const CoefficientField unit = CoefficientField::constant(1.0);

  const ComparisonResult same = comparison_test(one, g, zero, zero);
  CHECK(same.pass);
  CHECK(same.worst_violation == 0.0);
  CHECK(comparison_test(one, g, zero, unit).pass);
  CHECK(comparison_test(one, g, unit, zero).pass);

  // Bump on zero data: strictly positive away from the data planes.
  const ProblemData nil = fixtures::constant_problem(3, 0.0);
  ProblemData bumped = nil;
  bumped.f = fixtures::same(3, 1.0);
  const SolutionCube cube = run_backward(bumped, g, Convection::Upwind);
  double lowest = 1.0;
  for (int p = 0; p < g.n_l(); ++p)
    for (int k = 1; k <= g.n_t(); ++k) lowest = std::min(lowest, cube.at(p, k).data().minCoeff());
  CHECK(lowest > 0.0);
  CHECK(comparison_test(nil, g, unit, unit).pass);
}

TEST_CASE("comparison holds on the manufactured case with variable perturbations") {
  const ManufacturedCase mc = manufactured_cosine(quadratic_spec());
  const GridSpec g(mc.data.network, 1.0, 1.0, 8, 16, 8);
  const ComparisonResult r =
      comparison_test(mc.data, g, CoefficientField::from_expression("1 + sin(3*x)*t"),
                      CoefficientField::from_expression("l*(1 - t)"));
  CHECK(r.pass);
  CHECK(r.worst_violation <= 1e-10);
}

TEST_CASE("interpolation lemma: constant and vacuous cases") {
  const GridSpec g(StarNetwork(2, 1.0), 1.0, 1.0, 8, 8, 8);
  const InterpolationCheck flat = holder_interpolation_check(cube_from(g, [](double, double, double) { return 1.0; }),
                                                             0.5, 0.5, 0.5, 0.0);
  CHECK(flat.pass());
  CHECK(flat.time.observed == 0.0);

  // u = t x: d_x u = t is constant in x, so nu3 = 0.
  const InterpolationCheck tx =
      holder_interpolation_check(cube_from(g, [](double t, double x, double) { return t * x; }), 0.5, 0.5, 0.5, 0.1);
  CHECK(tx.nu3 <= 1e-8);
  CHECK(tx.time.status == InterpolationStatement::Status::Vacuous);
  CHECK(tx.level.status == InterpolationStatement::Status::Vacuous);
  CHECK(tx.pass());
}

TEST_CASE("interpolation lemma holds on the manufactured solution") {
  const ManufacturedCase mc = manufactured_cosine(quadratic_spec());
  const GridSpec g(mc.data.network, 1.0, 1.0, 8, 16, 8);
  const SolutionCube cube = run_backward(mc.data, g, Convection::Centered);
  const InterpolationCheck check = holder_interpolation_check(cube, 0.5, 0.5, 0.5, 0.1);
  CHECK(check.nu1 > 0.0);
  CHECK(check.nu2 > 0.0);
  CHECK(check.nu3 > 0.0);
  CHECK(check.time.status == InterpolationStatement::Status::Pass);
  CHECK(check.level.status == InterpolationStatement::Status::Pass);
}

TEST_CASE("interpolation constant") {
  // nu = nu3 = 1, gamma = 1: 2 * 1 + 2 * 1 = 4.
  CHECK(interpolation_constant(1.0, 1.0, 1.0) == doctest::Approx(4.0));
}

TEST_CASE("classical comparison") {
  const ClassicalProblemData d = fixtures::classical_constant();
  const GridSpec g(d.network, 1.0, 1.0, 8, 16, 1);
  const ComparisonResult r = comparison_test(d, g, CoefficientField::constant(1.0), CoefficientField::constant(1.0));
  CHECK(r.pass);
  CHECK(r.worst_violation == 0.0);
}
