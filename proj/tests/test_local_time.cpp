#include <doctest.h>

#include "fixtures.hpp"
#include "starnet/local_time.hpp"
#include "starnet/verification.hpp"

#include <cmath>

using namespace starnet;

namespace {

GridSpec grid_for(const ProblemData& d, int n_t, int n_x, int n_l) {
  return GridSpec(d.network, d.horizon, d.l_max, n_t, n_x, n_l);
}

ManufacturedCase quadratic_case() {
  CosineSpec s;
  s.h = [](double l) { return l * l; };
  s.h_prime = [](double l) { return 2.0 * l; };
  s.h_description = "l^2";
  s.b = CoefficientField::constant(0.5);
  s.c = CoefficientField::constant(1.0);
  s.r = CoefficientField::constant(0.2);
  return manufactured_cosine(s);
}

double cube_deviation(const SolutionCube& cube, double value) {
  double worst = 0.0;
  for (const auto& level : cube.levels)
    for (const auto& u : level) worst = std::max(worst, (u.data().array() - value).abs().maxCoeff());
  return worst;
}

}  // namespace

TEST_CASE("beta constants for a quadratic junction trace") {
  ProblemData d = fixtures::constant_problem();
  d.g = fixtures::same(3, CoefficientField::from_expression("l^2"));
  d.g_l_junction = CoefficientField::from_expression("2*l");
  const GridSpec g = grid_for(d, 4, 4, 10);
  const BetaConstants declared = beta_constants(d, g);
  REQUIRE(declared.beta.size() == 10);
  for (double b : declared.beta) CHECK(std::abs(b - 0.1) <= 1e-12);

  // Numeric derivative: the centered difference is exact on quadratics up to rounding.
  d.g_l_junction.reset();
  for (double b : beta_constants(d, g).beta) CHECK(std::abs(b - 0.1) <= 1e-10);
}

TEST_CASE("beta vanishes for constant and linear traces") {
  ProblemData d = fixtures::constant_problem();
  for (double b : beta_constants(d, grid_for(d, 4, 4, 7)).beta) CHECK(b == 0.0);
  d.g = fixtures::same(3, CoefficientField::from_expression("l"));
  for (int n_l : {3, 10, 17})
    for (double b : beta_constants(d, grid_for(d, 4, 4, n_l)).beta) CHECK(std::abs(b) <= 1e-12);
}

TEST_CASE("numeric d_l g falls back to one-sided stencils at the ends") {
  ProblemData d = fixtures::constant_problem();
  d.g = fixtures::same(3, CoefficientField::from_expression("l^2"));
  const GridSpec g = grid_for(d, 4, 4, 4);
  CHECK(junction_l_derivative(d, g, 0.0) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(junction_l_derivative(d, g, 1.0) == doctest::Approx(2.0));
  CHECK(junction_l_derivative(d, g, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("level tables of the constant case") {
  const ProblemData d = fixtures::constant_problem();
  const GridSpec g = grid_for(d, 4, 8, 5);
  const std::vector<double> ones(5, 1.0);
  const ClassicalTables t = level_tables(2, ones, d, g, 0.0);
  CHECK(t.lambda.isConstant(5.0));
  CHECK(t.gamma.isConstant(-5.0));
  CHECK(t.initial.data().isConstant(1.0));
  CHECK_THROWS_AS(level_tables(5, ones, d, g, 0.0), std::out_of_range);
  CHECK_THROWS_AS(level_tables(0, std::vector<double>(3, 1.0), d, g, 0.0), std::invalid_argument);
}

TEST_CASE("constant data yields the constant cube for both schemes") {
  const ProblemData d = fixtures::constant_problem();
  for (Convection scheme : {Convection::Upwind, Convection::Centered}) {
    const SolutionCube cube = run_backward(d, grid_for(d, 16, 32, 16), scheme);
    CHECK(cube_deviation(cube, 1.0) <= 1e-10);
    const KirchhoffResidual kr = kirchhoff_residual(cube, d, cube.grid);
    CHECK(kr.sup <= 1e-9);
  }
}

TEST_CASE("zero data yields the zero cube") {
  const ProblemData d = fixtures::constant_problem(2, 0.0);
  const SolutionCube cube = run_backward(d, grid_for(d, 4, 8, 4), Convection::Upwind);
  CHECK(cube_deviation(cube, 0.0) == 0.0);
  const std::vector<double> zeros(5, 0.0);
  const Trajectory level = solve_level(1, zeros, d, cube.grid, Convection::Upwind);
  for (const auto& u : level.fields) CHECK(sup_norm(u) == 0.0);
}

TEST_CASE("boundary planes are reproduced bit for bit") {
  const ManufacturedCase mc = quadratic_case();
  const GridSpec g = grid_for(mc.data, 8, 16, 8);
  const SolutionCube cube = run_backward(mc.data, g, Convection::Centered);
  REQUIRE(cube.levels.size() == 9);
  for (int k = 0; k <= 8; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 1; j <= 16; ++j) CHECK(cube.at(8, k)(i, j) == mc.data.psi[i](g.time_node(k), g.space_node(j), 1.0));
  for (int p = 0; p <= 8; ++p)
    for (int i = 0; i < 3; ++i)
      for (int j = 1; j <= 16; ++j) CHECK(cube.at(p, 0)(i, j) == mc.data.g[i](0.0, g.space_node(j), g.level_node(p)));
}

TEST_CASE("the compliant Kirchhoff residual equals beta; the naive one vanishes after t = 0") {
  const ManufacturedCase mc = quadratic_case();
  const GridSpec g = grid_for(mc.data, 8, 32, 8);
  const BetaConstants beta = beta_constants(mc.data, g);
  const KirchhoffResidual compliant = kirchhoff_residual(run_backward(mc.data, g, Convection::Centered), mc.data, g);
  BackwardOptions naive;
  naive.naive_beta = true;
  const KirchhoffResidual dropped =
      kirchhoff_residual(run_backward(mc.data, g, Convection::Centered, naive), mc.data, g);
  for (int p = 0; p < 8; ++p) {
    for (int k = 1; k <= 8; ++k) {
      CHECK(compliant.table(p, k) == doctest::Approx(beta.beta[p]).epsilon(1e-9));
      CHECK(std::abs(dropped.table(p, k)) <= 1e-9);
    }
    // At t = 0 both runs read g; the residual is beta plus the corner defect.
    CHECK(compliant.table(p, 0) == dropped.table(p, 0));
  }
  CHECK(compliant.sup_interior == doctest::Approx(1.0 / 8.0).epsilon(1e-6));
}

TEST_CASE("manufactured solution error shrinks under joint refinement") {
  const ManufacturedCase mc = quadratic_case();
  double previous = 1.0;
  for (int n : {8, 16, 32}) {
    const SolutionCube cube = run_backward(mc.data, grid_for(mc.data, n, 2 * n, n), Convection::Centered);
    const double err = error_norms(cube, *mc.data.exact).sup;
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous < 1e-2);
}

TEST_CASE("run_backward guards its preconditions") {
  ProblemData d = fixtures::constant_problem();
  d.r = CoefficientField::constant(3.0);  // admissible_rate(3) = 9
  d.phi = CoefficientField::constant(-3.0);  // keeps u = 1 compatible
  CHECK_THROWS_AS(run_backward(d, grid_for(d, 4, 8, 4), Convection::Upwind), std::invalid_argument);
  CHECK_NOTHROW(run_backward(d, grid_for(d, 4, 8, 9), Convection::Upwind));

  ProblemData bad = fixtures::constant_problem();
  bad.phi = CoefficientField::constant(1.0);
  CHECK_THROWS_AS(run_backward(bad, grid_for(bad, 4, 8, 4), Convection::Upwind), AssumptionViolation);
  BackwardOptions unchecked;
  unchecked.validate = false;
  CHECK_NOTHROW(run_backward(bad, grid_for(bad, 4, 8, 4), Convection::Upwind, unchecked));
}

TEST_CASE("solver errors carry the level index") {
  ProblemData d = fixtures::constant_problem();
  d.c = fixtures::same(3, 10.0);  // admissible_rate(10) = 100 > n_t
  try {
    run_backward(d, grid_for(d, 4, 8, 4), Convection::Upwind);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).rfind("level 3: ", 0) == 0);
  }
}
