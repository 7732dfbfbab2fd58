#include "starnet/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace starnet {

StepFloors step_floors(double c_sup, double r_sup) { return {admissible_rate(c_sup), admissible_rate(r_sup)}; }

double constant_C0(double gamma_sup, double lambda_floor, double g_sup, double f_sup, double c_sup) {
  return (std::max(gamma_sup / lambda_floor, g_sup) + f_sup) * std::exp(c_sup + 1.0);
}

double constant_C0_alternate(double gamma_sup, double lambda_floor, double g_sup, double f_sup, double c_sup) {
  return std::max(gamma_sup / lambda_floor, g_sup + f_sup) * std::exp(c_sup + 1.0);
}

double constant_Cg(double a_sup, double gxx_sup, double b_sup, double gx_sup, double c_sup, double g_sup,
                   double f_sup) {
  return a_sup * gxx_sup + b_sup * gx_sup + c_sup * g_sup + f_sup;
}

double constant_K(double a_floor, double alpha_ratio, double C0, double bW, double cW, double fW) {
  const double scale = 1.0 / std::max(a_floor * a_floor * a_floor, 1.0);
  return scale * (1.0 + alpha_ratio + C0 + kUniversalC) * (bW + cW + fW);
}

double constant_C1(double C0, double lambdaW, double gammaW, double lambda_floor, double Cg, double K) {
  return (1.0 + std::max((C0 * lambdaW + gammaW) / lambda_floor, Cg)) * std::exp(K);
}

double constant_Cprime(double a_floor, double R, double C1, double C0, double b_sup, double c_sup, double f_sup,
                       double aW, double bW) {
  return (R * C1 + C0 * (2.0 * b_sup + R * (c_sup + f_sup)) + 2.0 * aW * bW / a_floor) / a_floor;
}

double constant_C2(double Cprime, double C1, double C0, double R, double a_floor, double b_sup, double c_sup,
                   double f_sup) {
  const double growth = R * b_sup / a_floor;
  const double spread = b_sup == 0.0 ? R / a_floor : std::expm1(growth) / b_sup;
  return Cprime * std::exp(growth) + (C1 + c_sup * C0 + f_sup) * spread;
}

double constant_C3(double C1, double C2, double C0, double a_floor, double b_sup, double c_sup, double f_sup) {
  return (C1 + b_sup * C2 + c_sup * C0 + f_sup) / a_floor;
}

double constant_Theta(double C0, double lambda_lip, double gamma_lip, double lambda_floor) {
  return (C0 * lambda_lip + gamma_lip) / lambda_floor;
}

double constant_M0(double g_sup, double psi_sup, double f_sup, double phi_sup, double g_l0_sup, double r_sup,
                   double c_sup, double T) {
  return (g_sup + psi_sup + f_sup + phi_sup + 2.0 * g_l0_sup) * std::exp(r_sup + 1.0) * std::exp(T * (c_sup + 1.0));
}

double constant_M1(double M0, double r_lip_t, double phi_lip_t, double psi0_lip_t, double Mg) {
  return std::max(M0 * r_lip_t + phi_lip_t, Mg) + std::max(psi0_lip_t, Mg);
}

double constant_M4(double a_floor, double M2, double M1, double M0, double aW, double bW, double cW, double fW,
                   int rays, double alpha_sup, double psi_sup) {
  const double interior = 2.0 / a_floor * (M2 * aW + M1 * aW * bW + M0 * aW * cW + aW * fW);
  return std::max(interior, rays * alpha_sup * M1 + psi_sup);
}

double NormInputs::get(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw std::out_of_range("missing norm '" + key + "'");
  return it->second;
}

void NormInputs::set(const std::string& key, double value, const std::string& source) {
  values[key] = value;
  sources[key] = source;
}

namespace {

struct SampledNorm {
  double sup = 0.0;
  double lip_t = 0.0, lip_x = 0.0, lip_l = 0.0;
  double lip() const { return std::sqrt(lip_t * lip_t + lip_x * lip_x + lip_l * lip_l); }
  void merge(const SampledNorm& o) {
    sup = std::max(sup, o.sup);
    lip_t = std::max(lip_t, o.lip_t);
    lip_x = std::max(lip_x, o.lip_x);
    lip_l = std::max(lip_l, o.lip_l);
  }
};

struct Axes {
  bool t = true, x = true, l = true;
};

// Sup and per-axis difference quotients of one field on the grid nodes of
// the axes it depends on; the other coordinates are pinned at `fixed_*`.
SampledNorm sample_field(const CoefficientField& field, const GridSpec& grid, Axes axes, double fixed_x = 0.0,
                         double fixed_l = 0.0) {
  const int nt = axes.t ? grid.n_t() : 0;
  const int nx = axes.x ? grid.n_x() : 0;
  const int nl = axes.l ? grid.n_l() : 0;
  std::vector<double> v(static_cast<std::size_t>(nt + 1) * (nx + 1) * (nl + 1));
  auto at = [&](int k, int j, int p) -> double& { return v[(static_cast<std::size_t>(p) * (nt + 1) + k) * (nx + 1) + j]; };
  for (int p = 0; p <= nl; ++p)
    for (int k = 0; k <= nt; ++k)
      for (int j = 0; j <= nx; ++j)
        at(k, j, p) = field(axes.t ? grid.time_node(k) : 0.0, axes.x ? grid.space_node(j) : fixed_x,
                            axes.l ? grid.level_node(p) : fixed_l);
  SampledNorm out;
  for (int p = 0; p <= nl; ++p)
    for (int k = 0; k <= nt; ++k)
      for (int j = 0; j <= nx; ++j) {
        const double u = at(k, j, p);
        if (!std::isfinite(u)) throw std::domain_error("non-finite sample of " + field.description);
        out.sup = std::max(out.sup, std::abs(u));
        if (k > 0) out.lip_t = std::max(out.lip_t, std::abs(u - at(k - 1, j, p)) / grid.dt());
        if (j > 0) out.lip_x = std::max(out.lip_x, std::abs(u - at(k, j - 1, p)) / grid.dx());
        if (p > 0) out.lip_l = std::max(out.lip_l, std::abs(u - at(k, j, p - 1)) / grid.dl());
      }
  if (field.declared_sup) out.sup = *field.declared_sup;
  if (field.declared_lip) {
    out.lip_t = *field.declared_lip;
    out.lip_x = out.lip_l = 0.0;
  }
  return out;
}

SampledNorm sample_rays(const RayFields& fields, const GridSpec& grid, Axes axes) {
  SampledNorm out;
  for (const auto& f : fields) out.merge(sample_field(f, grid, axes));
  return out;
}

// |g|, |d_x g|, |d_xx g| over rays, space nodes and the given l-nodes.
struct GNorms {
  double sup = 0.0, x = 0.0, xx = 0.0;
};

GNorms sample_initial(const RayFields& g, const GridSpec& grid, bool over_l) {
  GNorms out;
  const int nx = grid.n_x();
  const double dx = grid.dx();
  std::vector<double> v(nx + 1);
  for (const auto& gi : g)
    for (int p = 0; p <= (over_l ? grid.n_l() : 0); ++p) {
      const double l = over_l ? grid.level_node(p) : 0.0;
      for (int j = 0; j <= nx; ++j) v[j] = gi(0.0, grid.space_node(j), l);
      for (int j = 0; j <= nx; ++j) {
        out.sup = std::max(out.sup, std::abs(v[j]));
        double d1, d2;
        if (j == 0) {
          d1 = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dx);
          d2 = nx >= 3 ? (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (dx * dx)
                       : (v[0] - 2.0 * v[1] + v[2]) / (dx * dx);
        } else if (j == nx) {
          d1 = (3.0 * v[nx] - 4.0 * v[nx - 1] + v[nx - 2]) / (2.0 * dx);
          d2 = nx >= 3 ? (2.0 * v[nx] - 5.0 * v[nx - 1] + 4.0 * v[nx - 2] - v[nx - 3]) / (dx * dx)
                       : (v[nx] - 2.0 * v[nx - 1] + v[nx - 2]) / (dx * dx);
        } else {
          d1 = (v[j + 1] - v[j - 1]) / (2.0 * dx);
          d2 = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (dx * dx);
        }
        out.x = std::max(out.x, std::abs(d1));
        out.xx = std::max(out.xx, std::abs(d2));
      }
    }
  return out;
}

void set_coefficient_norms(NormInputs& n, const char* name, const SampledNorm& s) {
  n.set(std::string(name) + "_sup", s.sup);
  n.set(std::string(name) + "_lip", s.lip());
}

void apply_declared(NormInputs& n, const std::map<std::string, double>& declared) {
  for (const auto& [key, value] : declared) n.set(key, value, "declared");
}

}  // namespace

NormInputs collect_norms(const ClassicalProblemData& data, const GridSpec& grid) {
  check_shape(data);
  NormInputs n;
  const Axes tx{true, true, false};
  const Axes t_only{true, false, false};
  n.set("R", grid.ray_length(), "grid");
  n.set("T", grid.horizon(), "grid");
  n.set("I", grid.rays(), "grid");
  n.set("a_floor", data.a_floor, "data");
  n.set("alpha_floor", data.alpha_floor, "data");
  n.set("lambda_floor", data.lambda_floor, "data");
  set_coefficient_norms(n, "a", sample_rays(data.a, grid, tx));
  set_coefficient_norms(n, "b", sample_rays(data.b, grid, tx));
  set_coefficient_norms(n, "c", sample_rays(data.c, grid, tx));
  set_coefficient_norms(n, "f", sample_rays(data.f, grid, tx));
  n.set("alpha_sup", sample_rays(data.alpha, grid, t_only).sup);
  set_coefficient_norms(n, "lambda", sample_field(data.lambda, grid, t_only));
  set_coefficient_norms(n, "gamma", sample_field(data.gamma, grid, t_only));
  const GNorms g = sample_initial(data.g, grid, false);
  n.set("g_sup", g.sup);
  n.set("g_x_sup", g.x);
  n.set("g_xx_sup", g.xx);
  apply_declared(n, data.declared_norms);
  return n;
}

NormInputs collect_norms(const ProblemData& data, const GridSpec& grid) {
  check_shape(data);
  NormInputs n;
  const Axes all{true, true, true};
  const Axes tl{true, false, true};
  n.set("R", grid.ray_length(), "grid");
  n.set("T", grid.horizon(), "grid");
  n.set("I", grid.rays(), "grid");
  n.set("a_floor", data.a_floor, "data");
  n.set("alpha_floor", data.alpha_floor, "data");
  set_coefficient_norms(n, "a", sample_rays(data.a, grid, all));
  set_coefficient_norms(n, "b", sample_rays(data.b, grid, all));
  set_coefficient_norms(n, "c", sample_rays(data.c, grid, all));
  set_coefficient_norms(n, "f", sample_rays(data.f, grid, all));
  n.set("alpha_sup", sample_rays(data.alpha, grid, tl).sup);

  const SampledNorm r = sample_field(data.r, grid, tl);
  n.set("r_sup", r.sup);
  n.set("r_lip_t", data.r.declared_lip ? *data.r.declared_lip : r.lip_t);
  const SampledNorm phi = sample_field(data.phi, grid, tl);
  n.set("phi_sup", phi.sup);
  n.set("phi_lip_t", data.phi.declared_lip ? *data.phi.declared_lip : phi.lip_t);

  SampledNorm psi;
  for (const auto& f : data.psi) psi.merge(sample_field(f, grid, {true, true, false}, 0.0, grid.l_max()));
  n.set("psi_sup", psi.sup);
  n.set("psi0_lip_t", sample_field(data.psi[0], grid, {true, false, false}, 0.0, grid.l_max()).lip_t);

  const GNorms g = sample_initial(data.g, grid, true);
  n.set("g_sup", g.sup);
  n.set("g_x_sup", g.x);
  n.set("g_xx_sup", g.xx);
  double gl = 0.0;
  for (int p = 0; p <= grid.n_l(); ++p)
    gl = std::max(gl, std::abs(junction_l_derivative(data, grid, grid.level_node(p))));
  n.set("g_l0_sup", gl);
  apply_declared(n, data.declared_norms);
  return n;
}

std::vector<std::pair<std::string, double>> ConstantSet::evaluated() const {
  const std::pair<const char*, double> all[] = {
      {"C0", C0},   {"C0_alternate", C0_alternate}, {"C1", C1}, {"C2", C2}, {"C3", C3},
      {"C_g", C_g}, {"C_prime", C_prime},           {"K", K_const}, {"M0", M0}, {"M1", M1},
      {"M4", M4},   {"M_g", M_g},                   {"Theta", Theta}};
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [name, value] : all)
    if (!std::isnan(value)) out.emplace_back(name, value);
  std::sort(out.begin(), out.end());
  return out;
}

ConstantSet constants_classical(const NormInputs& n) {
  ConstantSet s;
  s.inputs = n;
  const double a_floor = n.get("a_floor");
  const double lambda_floor = n.get("lambda_floor");
  const double b = n.get("b_sup"), c = n.get("c_sup"), f = n.get("f_sup");
  const double R = n.get("R");
  s.C0 = constant_C0(n.get("gamma_sup"), lambda_floor, n.get("g_sup"), f, c);
  s.C0_alternate = constant_C0_alternate(n.get("gamma_sup"), lambda_floor, n.get("g_sup"), f, c);
  s.C_g = constant_Cg(n.get("a_sup"), n.get("g_xx_sup"), b, n.get("g_x_sup"), c, n.get("g_sup"), f);
  s.K_const = constant_K(a_floor, n.get("alpha_sup") / n.get("alpha_floor"), s.C0, n.W("b"), n.W("c"), n.W("f"));
  s.C1 = constant_C1(s.C0, n.W("lambda"), n.W("gamma"), lambda_floor, s.C_g, s.K_const);
  s.C_prime = constant_Cprime(a_floor, R, s.C1, s.C0, b, c, f, n.W("a"), n.W("b"));
  s.C2 = constant_C2(s.C_prime, s.C1, s.C0, R, a_floor, b, c, f);
  s.C3 = constant_C3(s.C1, s.C2, s.C0, a_floor, b, c, f);
  s.Theta = constant_Theta(s.C0, n.get("lambda_lip"), n.get("gamma_lip"), lambda_floor);
  return s;
}

ConstantSet constants_local_time(const NormInputs& n) {
  ConstantSet s;
  s.inputs = n;
  const double c = n.get("c_sup"), f = n.get("f_sup");
  s.M_g = constant_Cg(n.get("a_sup"), n.get("g_xx_sup"), n.get("b_sup"), n.get("g_x_sup"), c, n.get("g_sup"), f);
  s.M0 = constant_M0(n.get("g_sup"), n.get("psi_sup"), f, n.get("phi_sup"), n.get("g_l0_sup"), n.get("r_sup"), c,
                     n.get("T"));
  s.M1 = constant_M1(s.M0, n.get("r_lip_t"), n.get("phi_lip_t"), n.get("psi0_lip_t"), s.M_g);
  s.M4 = constant_M4(n.get("a_floor"), n.get("M2"), s.M1, s.M0, n.W("a"), n.W("b"), n.W("c"), n.W("f"),
                     static_cast<int>(n.get("I")), n.get("alpha_sup"), n.get("psi_sup"));
  return s;
}

namespace {

double interior_gradient(const NetworkField& u, double dx) {
  double best = 0.0;
  for (int i = 0; i < u.rays(); ++i)
    for (int j = 1; j < u.n_x(); ++j) best = std::max(best, std::abs(u(i, j + 1) - u(i, j - 1)) / (2.0 * dx));
  return best;
}

double interior_second_derivative(const NetworkField& u, double dx) {
  double best = 0.0;
  for (int i = 0; i < u.rays(); ++i)
    for (int j = 1; j < u.n_x(); ++j)
      best = std::max(best, std::abs(u(i, j + 1) - 2.0 * u(i, j) + u(i, j - 1)) / (dx * dx));
  return best;
}

CertificateEntry bound(std::string name, double constant, double observed, double slack, bool informational = false) {
  CertificateEntry e;
  e.name = std::move(name);
  e.constant = constant;
  e.observed = observed;
  e.slack = slack;
  e.informational = informational;
  e.pass = observed <= constant * (1.0 + slack);
  return e;
}

}  // namespace

ClassicalObservations observe(const Trajectory& traj) {
  ClassicalObservations o;
  const double dx = traj.grid.dx();
  for (const auto& u : traj.fields) {
    o.sup = std::max(o.sup, sup_norm(u));
    o.gradient = std::max(o.gradient, interior_gradient(u, dx));
    o.second_derivative = std::max(o.second_derivative, interior_second_derivative(u, dx));
  }
  const TimeDerivativeNorms d = discrete_time_derivative(traj);
  const double dt = traj.grid.dt(), noise = 1e-12 * std::max(1.0, o.sup);
  o.time_quotient = d.field_max * dt <= noise ? 0.0 : d.field_max;
  o.junction_quotient = d.junction_max * dt <= noise ? 0.0 : d.junction_max;
  return o;
}

LocalTimeObservations observe(const SolutionCube& cube) {
  LocalTimeObservations o;
  const GridSpec& grid = cube.grid;
  const int nl = grid.n_l();
  double junction_step = 0.0, level_step = 0.0, last_step = 0.0;
  for (int p = 0; p <= nl; ++p) {
    for (const auto& u : cube.levels[p]) {
      o.sup = std::max(o.sup, sup_norm(u));
      o.gradient = std::max(o.gradient, interior_gradient(u, grid.dx()));
    }
    const std::vector<double> trace = cube.junction_trace(p);
    junction_step = std::max(junction_step, lipschitz_seminorm(trace, grid.dt()) * grid.dt());
    if (p < nl) {
      double d = 0.0;
      for (int k = 0; k <= grid.n_t(); ++k)
        d = std::max(d, (cube.at(p + 1, k).data() - cube.at(p, k).data()).cwiseAbs().maxCoeff());
      if (p <= nl - 2) level_step = std::max(level_step, d);
      else last_step = d;
    }
  }
  // Differences at rounding level are not resolved and count as zero.
  const double noise = 1e-12 * std::max(1.0, o.sup);
  auto resolved = [noise](double step, double spacing) { return step <= noise ? 0.0 : step / spacing; };
  o.junction_lip_t = resolved(junction_step, grid.dt());
  o.level_quotient = resolved(level_step, grid.dl());
  o.level_quotient_last = resolved(last_step, grid.dl());
  return o;
}

bool CertificateReport::pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const CertificateEntry& e) { return e.pass || e.informational; });
}

std::string CertificateReport::summary() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& e : entries) {
    if (e.pass || e.informational) continue;
    if (!first) os << "; ";
    first = false;
    os << e.name << " observed " << e.observed << " > " << e.constant << " * (1 + " << e.slack << ")";
  }
  return first ? std::string("all bounds hold") : os.str();
}

CertificateReport certify(const ClassicalObservations& o, const ConstantSet& c, double slack) {
  CertificateReport r;
  r.entries.push_back(bound("C0 sup |u^k|", c.C0, o.sup, slack));
  r.entries.push_back(bound("C1 time quotient", c.C1, o.time_quotient, slack));
  r.entries.push_back(bound("C2 gradient", c.C2, o.gradient, slack));
  r.entries.push_back(bound("C3 second derivative", c.C3, o.second_derivative, slack));
  r.entries.push_back(bound("Theta v C(g) junction quotient", std::max(c.Theta, c.C_g), o.junction_quotient, slack));
  return r;
}

CertificateReport certify(const LocalTimeObservations& o, const ConstantSet& c, double slack) {
  CertificateReport r;
  r.entries.push_back(bound("M0 sup |u^p|", c.M0, o.sup, slack));
  r.entries.push_back(bound("M1 junction Lipschitz in t", c.M1, o.junction_lip_t, slack));
  r.entries.push_back(bound("M4 level quotient p <= n_l-2", c.M4, o.level_quotient, slack));
  r.entries.push_back(bound("level quotient p = n_l-1", c.M4, o.level_quotient_last, slack, true));
  return r;
}

CertificateRun certify_run(const ClassicalProblemData& data, const Trajectory& traj, double slack) {
  CertificateRun run;
  run.constants = constants_classical(collect_norms(data, traj.grid));
  run.report = certify(observe(traj), run.constants, slack);
  return run;
}

CertificateRun certify_run(const ProblemData& data, const SolutionCube& cube, double slack) {
  NormInputs norms = collect_norms(data, cube.grid);
  const LocalTimeObservations o = observe(cube);
  if (!norms.has("M2")) {
    double psi_x = 0.0;
    for (const auto& psi : data.psi)
      psi_x = std::max(psi_x, sample_field(psi, cube.grid, {true, true, false}, 0.0, cube.grid.l_max()).lip_x);
    norms.set("M2", std::max(o.gradient, psi_x), "observed");
  }
  CertificateRun run;
  run.constants = constants_local_time(norms);
  run.report = certify(o, run.constants, slack);
  return run;
}

}  // namespace starnet
