#pragma once

#include "starnet/problem.hpp"

namespace fixtures {

using starnet::ClassicalProblemData;
using starnet::CoefficientField;
using starnet::ProblemData;
using starnet::RayFields;
using starnet::StarNetwork;

inline RayFields same(int rays, const CoefficientField& f) { return RayFields(rays, f); }
inline RayFields same(int rays, double v) { return RayFields(rays, CoefficientField::constant(v)); }

/// g = psi = value, f = c = r = phi = 0; any a, b, alpha.
inline ProblemData constant_problem(int rays = 3, double value = 1.0, double a = 1.5, double b = 0.3,
                                    double alpha = 0.5) {
  ProblemData d;
  d.name = "constant";
  d.network = StarNetwork(rays, 1.0);
  d.a = same(rays, a);
  d.b = same(rays, b);
  d.c = same(rays, 0.0);
  d.f = same(rays, 0.0);
  d.alpha = same(rays, alpha);
  d.psi = same(rays, value);
  d.g = same(rays, value);
  d.r = CoefficientField::constant(0.0);
  d.phi = CoefficientField::constant(0.0);
  d.a_floor = a;
  d.alpha_floor = alpha;
  return d;
}

/// g = 1, lambda = 1, gamma = -1, alpha = 1/2: u = 1 is an exact steady state.
inline ClassicalProblemData classical_constant(int rays = 2) {
  ClassicalProblemData d;
  d.name = "classical_constant";
  d.network = StarNetwork(rays, 1.0);
  d.a = same(rays, 1.0);
  d.b = same(rays, 0.0);
  d.c = same(rays, 0.0);
  d.f = same(rays, 0.0);
  d.alpha = same(rays, 0.5);
  d.g = same(rays, 1.0);
  d.lambda = CoefficientField::constant(1.0);
  d.gamma = CoefficientField::constant(-1.0);
  d.a_floor = 1.0;
  d.alpha_floor = 0.5;
  d.lambda_floor = 1.0;
  return d;
}

inline ClassicalProblemData classical_zero(int rays = 2) {
  ClassicalProblemData d = classical_constant(rays);
  d.name = "classical_zero";
  d.g = same(rays, 0.0);
  d.gamma = CoefficientField::constant(0.0);
  return d;
}

}  // namespace fixtures
