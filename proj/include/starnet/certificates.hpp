#pragma once

#include "starnet/local_time.hpp"
#include "starnet/network.hpp"
#include "starnet/problem.hpp"
#include "starnet/rothe.hpp"

#include <limits>
#include <map>
#include <string>
#include <vector>

namespace starnet {

/// Grid floors from admissible_rate: |c|_inf for the time rate and |r|_inf
/// for the level rate.
StepFloors step_floors(double c_sup, double r_sup);

// Closed-form constants. Every argument is a sup norm, a Lipschitz
// seminorm, a W^{1,inf} norm (sup + Lipschitz) or a floor; all are
// non-decreasing in the norm arguments.

/// ((gamma_sup / lambda_floor) v g_sup + f_sup) e^{c_sup + 1}.
double constant_C0(double gamma_sup, double lambda_floor, double g_sup, double f_sup, double c_sup);
/// Other reading of the same formula: ((gamma_sup / lambda_floor) v (g_sup + f_sup)) e^{c_sup + 1}.
double constant_C0_alternate(double gamma_sup, double lambda_floor, double g_sup, double f_sup, double c_sup);
/// a_sup gxx_sup + b_sup gx_sup + c_sup g_sup + f_sup.
double constant_Cg(double a_sup, double gxx_sup, double b_sup, double gx_sup, double c_sup, double g_sup, double f_sup);

/// Universal constant of the time-derivative estimate.
inline constexpr double kUniversalC = 1188.0;

/// (1 / (a_floor^3 v 1)) (1 + alpha_ratio + C0 + 1188) (bW + cW + fW).
double constant_K(double a_floor, double alpha_ratio, double C0, double bW, double cW, double fW);
/// (1 + ((C0 lambdaW + gammaW) / lambda_floor v Cg)) e^K.
double constant_C1(double C0, double lambdaW, double gammaW, double lambda_floor, double Cg, double K);
double constant_Cprime(double a_floor, double R, double C1, double C0, double b_sup, double c_sup, double f_sup,
                       double aW, double bW);
/// C' e^{R |b| / a} + (C1 + |c| C0 + |f|) (e^{R |b| / a} - 1) / |b|, with the
/// |b| = 0 limit R / a for the last factor.
double constant_C2(double Cprime, double C1, double C0, double R, double a_floor, double b_sup, double c_sup,
                   double f_sup);
double constant_C3(double C1, double C2, double C0, double a_floor, double b_sup, double c_sup, double f_sup);
/// (C0 |lambda|_Lip + |gamma|_Lip) / lambda_floor.
double constant_Theta(double C0, double lambda_lip, double gamma_lip, double lambda_floor);

/// (|g| + |psi| + |f| + |phi| + 2 |d_l g(0,.)|) e^{|r| + 1} e^{T (|c| + 1)}.
double constant_M0(double g_sup, double psi_sup, double f_sup, double phi_sup, double g_l0_sup, double r_sup,
                   double c_sup, double T);
/// ((M0 |r|_Lip_t + |phi|_Lip_t) v Mg) + (|psi(., 0)|_Lip_t v Mg).
double constant_M1(double M0, double r_lip_t, double phi_lip_t, double psi0_lip_t, double Mg);
/// (2 / a_floor)(M2 aW + M1 aW bW + M0 aW cW + aW fW) v (I |alpha| M1 + |psi|).
double constant_M4(double a_floor, double M2, double M1, double M0, double aW, double bW, double cW, double fW,
                   int rays, double alpha_sup, double psi_sup);

/// Named norms of the data. Keys:
///   R, T, I, a_floor, alpha_floor, lambda_floor,
///   {a,b,c,f}_sup, {a,b,c,f}_lip, alpha_sup, g_sup, g_x_sup, g_xx_sup,
///   lambda_sup, lambda_lip, gamma_sup, gamma_lip          (classical)
///   r_sup, r_lip_t, phi_sup, phi_lip_t, psi_sup, psi0_lip_t, g_l0_sup, M2  (local time)
struct NormInputs {
  std::map<std::string, double> values;
  /// Keys whose value came from a declaration rather than sampling.
  std::map<std::string, std::string> sources;

  double get(const std::string& key) const;  // throws std::out_of_range naming the key
  bool has(const std::string& key) const { return values.count(key) != 0; }
  void set(const std::string& key, double value, const std::string& source = "sampled");
  double W(const std::string& field) const { return get(field + "_sup") + get(field + "_lip"); }
};

/// Norms sampled on grid nodes; declared sup/lip values on coefficient
/// fields and entries of declared_norms take precedence.
NormInputs collect_norms(const ClassicalProblemData& data, const GridSpec& grid);
NormInputs collect_norms(const ProblemData& data, const GridSpec& grid);

/// Unevaluated constants stay NaN.
struct ConstantSet {
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
  double C_g = kUnset, K_const = kUnset, C0 = kUnset, C0_alternate = kUnset, C1 = kUnset, C_prime = kUnset,
         C2 = kUnset, C3 = kUnset, Theta = kUnset;
  double M_g = kUnset, M0 = kUnset, M1 = kUnset, M4 = kUnset;
  NormInputs inputs;

  /// (name, value) pairs of the evaluated constants, sorted by name.
  std::vector<std::pair<std::string, double>> evaluated() const;
};

ConstantSet constants_classical(const NormInputs& norms);
ConstantSet constants_local_time(const NormInputs& norms);

struct ClassicalObservations {
  double sup = 0.0;                // max_k |u^k|_inf
  double time_quotient = 0.0;      // max_k |u^k - u^{k-1}|_inf / dt
  double gradient = 0.0;           // max_k centered |d_x u^k| at interior nodes
  double second_derivative = 0.0;  // max_k centered |d_xx u^k| at interior nodes
  double junction_quotient = 0.0;  // max_k |u^k(0) - u^{k-1}(0)| / dt
};

struct LocalTimeObservations {
  double sup = 0.0;                 // over the cube
  double junction_lip_t = 0.0;      // max_p Lipschitz seminorm of t -> u^p(t, 0)
  double level_quotient = 0.0;      // max_{p <= n_l-2} |u^{p+1} - u^p|_inf / dl
  double level_quotient_last = 0.0; // p = n_l-1, reported only
  double gradient = 0.0;            // centered |d_x u| over the cube
};

ClassicalObservations observe(const Trajectory& traj);
LocalTimeObservations observe(const SolutionCube& cube);

struct CertificateEntry {
  std::string name;
  double constant = 0.0;
  double observed = 0.0;
  double slack = 0.0;
  bool pass = true;
  /// Reported without gating (e.g. the last level's quotient).
  bool informational = false;
};

struct CertificateReport {
  std::vector<CertificateEntry> entries;
  bool pass() const;
  std::string summary() const;  // failing entries, or "all bounds hold"
};

/// A bound passes when observed <= constant * (1 + slack).
CertificateReport certify(const ClassicalObservations& observed, const ConstantSet& constants, double slack);
CertificateReport certify(const LocalTimeObservations& observed, const ConstantSet& constants, double slack);

/// collect_norms + observe + constants + certify. For local-time runs a
/// missing M2 is replaced by the observed gradient v |d_x psi|_inf.
struct CertificateRun {
  ConstantSet constants;
  CertificateReport report;
};
CertificateRun certify_run(const ClassicalProblemData& data, const Trajectory& traj, double slack);
CertificateRun certify_run(const ProblemData& data, const SolutionCube& cube, double slack);

}  // namespace starnet
