#include <doctest.h>

#include "starnet/elliptic.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <random>

using namespace starnet;

namespace {

KirchhoffParams kirchhoff(double lambda, int rays, double alpha, double gamma) {
  return {lambda, Eigen::VectorXd::Constant(rays, alpha), gamma};
}

// u - u'' = 0 on two rays of length 1, u'(1) = 0, -u(0) + sum u_i'(0)/2 = -1.
// Exact: u = e^{-1} cosh(x - 1), u(0) = (1 + e^{-2}) / 2.
EllipticStepSpec hyperbolic(int n_x) {
  const StarNetwork net(2, 1.0);
  return EllipticStepSpec::uniform(net, n_x, 1.0, 1.0, 0.0, 0.0, 0.0, kirchhoff(1.0, 2, 0.5, -1.0),
                                   NetworkField(2, n_x, 0.0));
}

const double kHyperbolicU0 = (1.0 + std::exp(-2.0)) / 2.0;

EllipticStepSpec random_spec(std::mt19937& rng, int rays, int n_x) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  EllipticStepSpec spec = EllipticStepSpec::uniform(StarNetwork(rays, 1.0), n_x, 8.0, 1.0, 0.0, 0.0, 0.0,
                                                    kirchhoff(1.0, rays, 1.0, 0.0), NetworkField(rays, n_x));
  spec.a_floor = 0.5;
  spec.alpha_floor = 0.25;
  for (int i = 0; i < rays; ++i) {
    for (int j = 0; j <= n_x; ++j) {
      spec.a[i](j) = 0.5 + u01(rng);
      spec.b[i](j) = 4.0 * (u01(rng) - 0.5);
      spec.c[i](j) = u01(rng);
      spec.f[i](j) = u01(rng) - 0.5;
    }
    spec.kirchhoff.alpha(i) = 0.25 + u01(rng);
  }
  spec.kirchhoff.lambda = 0.5 + u01(rng);
  spec.kirchhoff.gamma = u01(rng) - 0.5;
  for (Eigen::Index s = 0; s < spec.prev.size(); ++s) spec.prev.data()(s) = u01(rng);
  return spec;
}

}  // namespace

TEST_CASE("system dimension is I * n_x + 1") {
  const EllipticStepSpec spec = EllipticStepSpec::uniform(StarNetwork(2, 1.0), 2, 1.0, 1.0, 0.0, 0.0, 0.0,
                                                          kirchhoff(1.0, 2, 0.5, 0.0), NetworkField(2, 2));
  const auto sys = assemble_step(spec, Convection::Upwind);
  CHECK(sys.dimension() == 5);
  CHECK(sys.to_sparse().rows() == 5);
}

TEST_CASE("centered and upwind coincide without convection") {
  std::mt19937 rng(3);
  EllipticStepSpec spec = random_spec(rng, 3, 10);
  for (auto& b : spec.b) b.setZero();
  const auto c = assemble_step(spec, Convection::Centered);
  const auto u = assemble_step(spec, Convection::Upwind);
  CHECK((Eigen::MatrixXd(c.to_sparse()) - Eigen::MatrixXd(u.to_sparse())).cwiseAbs().maxCoeff() == 0.0);
  CHECK((c.rhs_vector() - u.rhs_vector()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hyperbolic junction oracle") {
  const EllipticStepSpec spec = hyperbolic(200);
  const NetworkField u = solve_arrow_banded(assemble_step(spec, Convection::Centered));
  CHECK(std::abs(u.junction() - kHyperbolicU0) < 1e-3);
  CHECK(elliptic_residual(u, spec, Convection::Centered).max() < 1e-10);
  CHECK(junction_continuity_check(u, 0.0));
  // Exact profile along each ray.
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j <= 200; j += 20) CHECK(std::abs(u(i, j) - std::exp(-1.0) * std::cosh(j / 200.0 - 1.0)) < 1e-3);
}

TEST_CASE("hyperbolic oracle converges at second order with the centered scheme") {
  std::vector<double> errors;
  for (int n : {50, 100, 200, 400}) {
    const NetworkField u = solve_arrow_banded(assemble_step(hyperbolic(n), Convection::Centered));
    errors.push_back(std::abs(u.junction() - kHyperbolicU0));
  }
  for (std::size_t m = 1; m < errors.size(); ++m)
    CHECK(std::log2(errors[m - 1] / errors[m]) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("arrow solve agrees with a sparse LU factorisation") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const EllipticStepSpec spec = random_spec(rng, 2 + trial % 4, 5 + 3 * trial);
    for (Convection scheme : {Convection::Centered, Convection::Upwind}) {
      const auto sys = assemble_step(spec, scheme);
      Eigen::SparseMatrix<double> m = sys.to_sparse();
      m.makeCompressed();
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(m);
      REQUIRE(lu.info() == Eigen::Success);
      const Eigen::VectorXd reference = lu.solve(sys.rhs_vector());
      const NetworkField u = solve_arrow_banded(sys);
      CHECK((u.data() - reference).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + reference.cwiseAbs().maxCoeff()));
      CHECK(elliptic_residual(u, spec, scheme).max() < 1e-9);
    }
  }
}

TEST_CASE("upwind assembly is an M-matrix") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const EllipticStepSpec spec = random_spec(rng, 3, 16);
    const Eigen::MatrixXd m = assemble_step(spec, Convection::Upwind).to_sparse();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      CHECK(m(r, r) > 0.0);
      double off = 0.0;
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c == r) continue;
        CHECK(m(r, c) <= 0.0);
        off += std::abs(m(r, c));
      }
      CHECK(m(r, r) >= off);
    }
  }
}

TEST_CASE("upwind solution is monotone in f and -gamma") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const EllipticStepSpec spec = random_spec(rng, 3, 12);
    EllipticStepSpec raised = spec;
    for (auto& f : raised.f)
      for (Eigen::Index j = 0; j < f.size(); ++j) f(j) += u01(rng);
    raised.kirchhoff.gamma -= u01(rng);
    const NetworkField lo = solve_arrow_banded(assemble_step(spec, Convection::Upwind));
    const NetworkField hi = solve_arrow_banded(assemble_step(raised, Convection::Upwind));
    CHECK((hi.data() - lo.data()).minCoeff() >= -1e-12);
  }
}

TEST_CASE("homogeneous data gives the zero field") {
  const EllipticStepSpec spec = EllipticStepSpec::uniform(StarNetwork(3, 1.0), 16, 4.0, 1.0, 0.5, 1.0, 0.0,
                                                          kirchhoff(1.0, 3, 0.5, 0.0), NetworkField(3, 16, 0.0));
  const NetworkField u = solve_arrow_banded(assemble_step(spec, Convection::Upwind));
  CHECK(sup_norm(u) == 0.0);
}

TEST_CASE("large rate reproduces the previous field") {
  // lambda-row consistent with u = 5: -lambda * 5 + 0 = gamma.
  const double rate = 1e8;
  const EllipticStepSpec spec = EllipticStepSpec::uniform(StarNetwork(2, 1.0), 20, rate, 1.0, 0.0, 0.0, 0.0,
                                                          kirchhoff(1.0, 2, 0.5, -5.0), NetworkField(2, 20, 5.0));
  const NetworkField u = solve_arrow_banded(assemble_step(spec, Convection::Centered));
  CHECK((u.data().array() - 5.0).abs().maxCoeff() < 1e-10);
}

TEST_CASE("residual of a shifted field") {
  const EllipticStepSpec spec = hyperbolic(50);
  NetworkField u = solve_arrow_banded(assemble_step(spec, Convection::Centered));
  NetworkField shifted = u;
  shifted.data().array() += 1.0;
  // rate * 1 + c * 1 with rate = 1, c = 0.
  CHECK(elliptic_residual(shifted, spec, Convection::Centered).interior_sup == doctest::Approx(1.0));

  // The one-sided flux stencil contributes -3 alpha_i / (2 dx) per ray.
  const double eps = 1e-3;
  NetworkField bumped = u;
  bumped.junction() += eps;
  const double growth = spec.kirchhoff.lambda + 3.0 * spec.kirchhoff.alpha.sum() / (2.0 * spec.dx);
  CHECK(elliptic_residual(bumped, spec, Convection::Centered).kirchhoff_abs == doctest::Approx(growth * eps));
}

TEST_CASE("assembly rejects invalid steps") {
  EllipticStepSpec spec = hyperbolic(10);
  spec.min_rate = 2.0;
  CHECK_THROWS_AS(assemble_step(spec, Convection::Upwind), std::invalid_argument);
  spec = hyperbolic(10);
  spec.f[1](3) = std::nan("");
  CHECK_THROWS_AS(assemble_step(spec, Convection::Upwind), std::invalid_argument);
  spec = hyperbolic(10);
  spec.a_floor = 2.0;
  CHECK_THROWS_AS(assemble_step(spec, Convection::Upwind), std::invalid_argument);
}

TEST_CASE("degenerate reduction is reported") {
  ArrowBandedSystem<double> sys;
  sys.rays = 2;
  sys.n_x = 2;
  sys.lower.assign(2, Eigen::VectorXd::Zero(2));
  sys.diag.assign(2, Eigen::VectorXd::Ones(2));
  sys.upper.assign(2, Eigen::VectorXd::Zero(2));
  sys.rhs.assign(2, Eigen::VectorXd::Zero(2));
  sys.junction_coupling = Eigen::VectorXd::Zero(2);
  sys.junction_diag = 0.0;
  try {
    solve_arrow_banded(sys);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(std::string(e.what()) == "degenerate junction reduction");
  }
  sys.junction_diag = 1.0;
  sys.diag[1](0) = 0.0;
  CHECK_THROWS_AS(solve_arrow_banded(sys), SolverError);
}

TEST_CASE("scheme names") {
  CHECK(parse_convection("upwind") == Convection::Upwind);
  CHECK(parse_convection("centered") == Convection::Centered);
  CHECK(std::string(to_string(Convection::Upwind)) == "upwind");
  CHECK_THROWS_AS(parse_convection("lax"), std::invalid_argument);
}

TEST_CASE("arrow solve works in long double") {
  ArrowBandedSystem<long double> sys;
  const auto d = assemble_step(hyperbolic(40), Convection::Centered);
  sys.rays = d.rays;
  sys.n_x = d.n_x;
  for (int i = 0; i < d.rays; ++i) {
    sys.lower.push_back(d.lower[i].cast<long double>());
    sys.diag.push_back(d.diag[i].cast<long double>());
    sys.upper.push_back(d.upper[i].cast<long double>());
    sys.rhs.push_back(d.rhs[i].cast<long double>());
  }
  sys.junction_coupling = d.junction_coupling.cast<long double>();
  sys.junction_diag = d.junction_diag;
  sys.junction_rhs = d.junction_rhs;
  const auto u = solve_arrow_banded(sys);
  CHECK(static_cast<double>(u.junction()) == doctest::Approx(solve_arrow_banded(d).junction()).epsilon(1e-12));
}
