#include "starnet/problem.hpp"

#include "starnet/expression.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace starnet {
namespace {

// Node description, formatted only when it becomes the worst one seen.
struct Node {
  const char* what;
  int ray;
  double t, x, l;
};

std::string node_label(const char* what, int ray, double t, double x, double l) {
  std::ostringstream os;
  os << what;
  if (ray >= 0) os << " ray " << ray;
  os << " at (t=" << t << ", x=" << x << ", l=" << l << ")";
  return os.str();
}

std::string node_label(const Node& n) { return node_label(n.what, n.ray, n.t, n.x, n.l); }

double checked(const CoefficientField& field, const char* name, int ray, double t, double x, double l) {
  const double v = field(t, x, l);
  if (!std::isfinite(v))
    throw std::domain_error("non-finite coefficient " + node_label(name, ray, t, x, l));
  return v;
}

struct FloorTracker {
  ValidationEntry entry;
  explicit FloorTracker(std::string name) {
    entry.name = std::move(name);
    entry.kind = ValidationEntry::Kind::Floor;
    entry.margin = std::numeric_limits<double>::infinity();
  }
  void observe(double margin, const Node& where) {
    if (margin < entry.margin) {
      entry.margin = margin;
      entry.where = node_label(where);
    }
  }
  ValidationEntry finish() {
    if (!std::isfinite(entry.margin)) entry.margin = 0.0;
    entry.pass = entry.margin >= 0.0;
    return entry;
  }
};

struct DefectTracker {
  ValidationEntry entry;
  DefectTracker(std::string name, double tol) {
    entry.name = std::move(name);
    entry.kind = ValidationEntry::Kind::Equality;
    entry.tolerance = tol;
    entry.margin = 0.0;
  }
  void observe(double defect, const Node& where) {
    const double d = std::abs(defect);
    if (entry.where.empty() || d > entry.margin) {
      entry.margin = d;
      entry.where = node_label(where);
    }
  }
  ValidationEntry finish() {
    entry.pass = std::isfinite(entry.margin) && entry.margin <= entry.tolerance;
    return entry;
  }
};

void check_declared(const CoefficientField& field, const std::string& name, double sampled_sup,
                    std::vector<ValidationEntry>& warnings) {
  if (field.declared_sup && sampled_sup > *field.declared_sup * (1.0 + 1e-12)) {
    ValidationEntry e;
    e.name = name + " declared sup";
    e.kind = ValidationEntry::Kind::Floor;
    e.margin = *field.declared_sup - sampled_sup;
    e.pass = false;
    e.where = "sampled sup " + std::to_string(sampled_sup);
    warnings.push_back(e);
  }
}

double max_abs_g(const RayFields& g, const GridSpec& grid, bool with_l) {
  double scale = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int p = 0; p <= (with_l ? grid.n_l() : 0); ++p)
      for (int j = 0; j <= grid.n_x(); ++j)
        scale = std::max(scale, std::abs(g[i](0.0, grid.space_node(j), with_l ? grid.level_node(p) : 0.0)));
  return scale;
}

}  // namespace

CoefficientField CoefficientField::constant(double value) {
  CoefficientField out;
  out.evaluator = [value](double, double, double) { return value; };
  std::ostringstream os;
  os.precision(17);
  os << value;
  out.description = os.str();
  return out;
}

CoefficientField CoefficientField::from_expression(const std::string& source) {
  CoefficientField out;
  Expression expr(source);
  out.evaluator = [expr](double t, double x, double l) { return expr(t, x, l); };
  out.description = source;
  return out;
}

CoefficientField CoefficientField::from_function(Evaluator fn, std::string description) {
  CoefficientField out;
  out.evaluator = std::move(fn);
  out.description = std::move(description);
  return out;
}

bool ValidationReport::pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const ValidationEntry& e) { return e.pass; });
}

const ValidationEntry* ValidationReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& e : entries) {
    if (e.pass) continue;
    if (!first) os << "; ";
    first = false;
    os << e.name << " margin " << e.margin << " at " << e.where;
  }
  return first ? std::string("all assumptions hold") : os.str();
}

AssumptionViolation::AssumptionViolation(ValidationReport report)
    : std::runtime_error("assumption check failed: " + report.summary()), report_(std::move(report)) {}

double second_order_derivative(const std::function<double(double)>& fn, double s, double h, double lo, double hi) {
  const double eps = 1e-12 * std::max(1.0, std::abs(hi - lo));
  if (s + 2.0 * h <= hi + eps) return (-3.0 * fn(s) + 4.0 * fn(s + h) - fn(s + 2.0 * h)) / (2.0 * h);
  if (s - 2.0 * h >= lo - eps) return (3.0 * fn(s) - 4.0 * fn(s - h) + fn(s - 2.0 * h)) / (2.0 * h);
  if (s - h >= lo - eps && s + h <= hi + eps) return (fn(s + h) - fn(s - h)) / (2.0 * h);
  throw std::invalid_argument("interval too short for a second-order difference");
}

void check_shape(const ProblemData& data) {
  const auto I = static_cast<std::size_t>(data.network.ray_count);
  auto need = [&](const RayFields& fields, const char* name) {
    if (fields.size() != I)
      throw std::invalid_argument(std::string("field ") + name + " needs one entry per ray (" + std::to_string(I) + ")");
    for (const auto& fld : fields)
      if (!fld) throw std::invalid_argument(std::string("field ") + name + " has an empty evaluator");
  };
  need(data.a, "a");
  need(data.b, "b");
  need(data.c, "c");
  need(data.f, "f");
  need(data.alpha, "alpha");
  need(data.psi, "psi");
  need(data.g, "g");
  if (!data.r) throw std::invalid_argument("field r is missing");
  if (!data.phi) throw std::invalid_argument("field phi is missing");
  if (data.exact && data.exact->size() != I) throw std::invalid_argument("exact solution needs one entry per ray");
}

void check_shape(const ClassicalProblemData& data) {
  const auto I = static_cast<std::size_t>(data.network.ray_count);
  auto need = [&](const RayFields& fields, const char* name) {
    if (fields.size() != I)
      throw std::invalid_argument(std::string("field ") + name + " needs one entry per ray (" + std::to_string(I) + ")");
    for (const auto& fld : fields)
      if (!fld) throw std::invalid_argument(std::string("field ") + name + " has an empty evaluator");
  };
  need(data.a, "a");
  need(data.b, "b");
  need(data.c, "c");
  need(data.f, "f");
  need(data.alpha, "alpha");
  need(data.g, "g");
  if (!data.lambda) throw std::invalid_argument("field lambda is missing");
  if (!data.gamma) throw std::invalid_argument("field gamma is missing");
  if (data.exact && data.exact->size() != I) throw std::invalid_argument("exact solution needs one entry per ray");
}

ValidationTolerances default_tolerances(const ProblemData& data, const GridSpec& grid) {
  ValidationTolerances tol;
  const double scale = std::max(1.0, max_abs_g(data.g, grid, true));
  tol.difference = 10.0 * (grid.dx() * grid.dx() + grid.dl() * grid.dl()) * scale;
  return tol;
}

ValidationTolerances default_tolerances(const ClassicalProblemData& data, const GridSpec& grid) {
  ValidationTolerances tol;
  const double scale = std::max(1.0, max_abs_g(data.g, grid, false));
  tol.difference = 10.0 * grid.dx() * grid.dx() * scale;
  return tol;
}

ValidationReport validate_assumptions(const ProblemData& data, const GridSpec& grid, std::optional<double> tol) {
  check_shape(data);
  if (grid.rays() != data.network.ray_count || grid.ray_length() != data.network.ray_length)
    throw std::invalid_argument("grid network does not match problem network");

  ValidationTolerances tols = default_tolerances(data, grid);
  if (tol) tols = {*tol, *tol};

  const int I = grid.rays();
  const double R = grid.ray_length();
  const double K = grid.l_max();
  ValidationReport report;

  FloorTracker a_floor("ellipticity a >= a_floor");
  FloorTracker alpha_floor("junction weights alpha >= alpha_floor");
  FloorTracker r_sign("r >= 0");
  for (int p = 0; p <= grid.n_l(); ++p) {
    const double l = grid.level_node(p);
    for (int k = 0; k <= grid.n_t(); ++k) {
      const double t = grid.time_node(k);
      for (int i = 0; i < I; ++i) {
        for (int j = 0; j <= grid.n_x(); ++j) {
          const double x = grid.space_node(j);
          a_floor.observe(data.a[i](t, x, l) - data.a_floor, Node{"a", i, t, x, l});
        }
        alpha_floor.observe(data.alpha[i](t, 0.0, l) - data.alpha_floor, Node{"alpha", i, t, 0.0, l});
      }
      r_sign.observe(data.r(t, 0.0, l), Node{"r", -1, t, 0.0, l});
    }
  }
  report.entries.push_back(a_floor.finish());
  report.entries.push_back(alpha_floor.finish());
  report.entries.push_back(r_sign.finish());

  // Corner compatibility at t = 0.
  DefectTracker kirchhoff("junction compatibility at t=0", tols.difference);
  DefectTracker neumann("Neumann compatibility at t=0", tols.difference);
  DefectTracker dirichlet("Dirichlet compatibility at l=K", tols.exact);
  DefectTracker g_junction("g junction continuity", tols.exact);
  DefectTracker psi_junction("psi junction continuity", tols.exact);

  const double dx = grid.dx();
  const double dl = grid.dl();
  for (int p = 0; p <= grid.n_l(); ++p) {
    const double l = grid.level_node(p);
    const double g0 = data.g[0](0.0, 0.0, l);
    for (int i = 1; i < I; ++i) g_junction.observe(data.g[i](0.0, 0.0, l) - g0, Node{"g", i, 0.0, 0.0, l});
    if (p == grid.n_l()) continue;  // conditions (i), (ii) hold for l in [0, K)

    double g_l = 0.0;
    if (data.g_l_junction) {
      g_l = (*data.g_l_junction)(0.0, 0.0, l);
    } else {
      g_l = second_order_derivative([&](double s) { return data.g[0](0.0, 0.0, s); }, l, dl, 0.0, K);
    }
    double flux = 0.0;
    for (int i = 0; i < I; ++i) {
      const double gx0 = second_order_derivative([&](double s) { return data.g[i](0.0, s, l); }, 0.0, dx, 0.0, R);
      flux += data.alpha[i](0.0, 0.0, l) * gx0;
      const double gxR = second_order_derivative([&](double s) { return data.g[i](0.0, s, l); }, R, dx, 0.0, R);
      neumann.observe(gxR, Node{"d_x g", i, 0.0, R, l});
    }
    const double defect = g_l + flux - data.r(0.0, 0.0, l) * g0 - data.phi(0.0, 0.0, l);
    kirchhoff.observe(defect, Node{"junction", -1, 0.0, 0.0, l});
  }
  for (int i = 0; i < I; ++i)
    for (int j = 0; j <= grid.n_x(); ++j) {
      const double x = grid.space_node(j);
      dirichlet.observe(data.g[i](0.0, x, K) - data.psi[i](0.0, x, K), Node{"g - psi", i, 0.0, x, K});
    }
  for (int k = 0; k <= grid.n_t(); ++k) {
    const double t = grid.time_node(k);
    const double psi0 = data.psi[0](t, 0.0, K);
    for (int i = 1; i < I; ++i) psi_junction.observe(data.psi[i](t, 0.0, K) - psi0, Node{"psi", i, t, 0.0, K});
  }
  report.entries.push_back(kirchhoff.finish());
  report.entries.push_back(neumann.finish());
  report.entries.push_back(dirichlet.finish());
  report.entries.push_back(g_junction.finish());
  report.entries.push_back(psi_junction.finish());

  auto declared = [&](const RayFields& fields, const char* name) {
    for (int i = 0; i < I; ++i) {
      if (!fields[i].declared_sup) continue;
      double sup = 0.0;
      for (int p = 0; p <= grid.n_l(); ++p)
        for (int k = 0; k <= grid.n_t(); ++k)
          for (int j = 0; j <= grid.n_x(); ++j)
            sup = std::max(sup, std::abs(fields[i](grid.time_node(k), grid.space_node(j), grid.level_node(p))));
      check_declared(fields[i], std::string(name) + "[" + std::to_string(i) + "]", sup,
                     report.declared_bound_warnings);
    }
  };
  declared(data.a, "a");
  declared(data.b, "b");
  declared(data.c, "c");
  declared(data.f, "f");
  return report;
}

ValidationReport validate_classical(const ClassicalProblemData& data, const GridSpec& grid, std::optional<double> tol) {
  check_shape(data);
  if (grid.rays() != data.network.ray_count || grid.ray_length() != data.network.ray_length)
    throw std::invalid_argument("grid network does not match problem network");

  ValidationTolerances tols = default_tolerances(data, grid);
  if (tol) tols = {*tol, *tol};

  const int I = grid.rays();
  const double R = grid.ray_length();
  ValidationReport report;

  FloorTracker a_floor("ellipticity a >= a_floor");
  FloorTracker alpha_floor("junction weights alpha >= alpha_floor");
  FloorTracker lambda_floor("lambda >= lambda_floor");
  for (int k = 0; k <= grid.n_t(); ++k) {
    const double t = grid.time_node(k);
    for (int i = 0; i < I; ++i) {
      for (int j = 0; j <= grid.n_x(); ++j) {
        const double x = grid.space_node(j);
        a_floor.observe(data.a[i](t, x, 0.0) - data.a_floor, Node{"a", i, t, x, 0.0});
      }
      alpha_floor.observe(data.alpha[i](t, 0.0, 0.0) - data.alpha_floor, Node{"alpha", i, t, 0.0, 0.0});
    }
    lambda_floor.observe(data.lambda(t, 0.0, 0.0) - data.lambda_floor, Node{"lambda", -1, t, 0.0, 0.0});
  }
  report.entries.push_back(a_floor.finish());
  report.entries.push_back(alpha_floor.finish());
  report.entries.push_back(lambda_floor.finish());

  DefectTracker kirchhoff("junction compatibility at t=0", tols.difference);
  DefectTracker neumann("Neumann compatibility at t=0", tols.difference);
  DefectTracker g_junction("g junction continuity", tols.exact);

  const double dx = grid.dx();
  const double g0 = data.g[0](0.0, 0.0, 0.0);
  double flux = 0.0;
  for (int i = 0; i < I; ++i) {
    if (i > 0) g_junction.observe(data.g[i](0.0, 0.0, 0.0) - g0, Node{"g", i, 0.0, 0.0, 0.0});
    const double gx0 = second_order_derivative([&](double s) { return data.g[i](0.0, s, 0.0); }, 0.0, dx, 0.0, R);
    flux += data.alpha[i](0.0, 0.0, 0.0) * gx0;
    const double gxR = second_order_derivative([&](double s) { return data.g[i](0.0, s, 0.0); }, R, dx, 0.0, R);
    neumann.observe(gxR, Node{"d_x g", i, 0.0, R, 0.0});
  }
  kirchhoff.observe(-data.lambda(0.0, 0.0, 0.0) * g0 + flux - data.gamma(0.0, 0.0, 0.0),
                    Node{"junction", -1, 0.0, 0.0, 0.0});
  report.entries.push_back(kirchhoff.finish());
  report.entries.push_back(neumann.finish());
  report.entries.push_back(g_junction.finish());
  return report;
}

LevelTables sample_level(const ProblemData& data, const GridSpec& grid, int p) {
  const int I = grid.rays();
  const int nt = grid.n_t();
  const int nx = grid.n_x();
  const double l = grid.level_node(p);
  LevelTables out;
  out.a.assign(I, Eigen::MatrixXd(nt + 1, nx + 1));
  out.b = out.a;
  out.c = out.a;
  out.f = out.a;
  out.alpha.resize(nt + 1, I);
  out.r.resize(nt + 1);
  out.phi.resize(nt + 1);
  for (int k = 0; k <= nt; ++k) {
    const double t = grid.time_node(k);
    for (int i = 0; i < I; ++i) {
      for (int j = 0; j <= nx; ++j) {
        const double x = grid.space_node(j);
        out.a[i](k, j) = checked(data.a[i], "a", i, t, x, l);
        out.b[i](k, j) = checked(data.b[i], "b", i, t, x, l);
        out.c[i](k, j) = checked(data.c[i], "c", i, t, x, l);
        out.f[i](k, j) = checked(data.f[i], "f", i, t, x, l);
      }
      out.alpha(k, i) = checked(data.alpha[i], "alpha", i, t, 0.0, l);
    }
    out.r(k) = checked(data.r, "r", -1, t, 0.0, l);
    out.phi(k) = checked(data.phi, "phi", -1, t, 0.0, l);
  }
  return out;
}

CoefficientTables sample_coefficients(const ProblemData& data, const GridSpec& grid) {
  check_shape(data);
  const int I = grid.rays();
  CoefficientTables out;
  out.grid = grid;
  out.levels.reserve(grid.n_l() + 1);
  for (int p = 0; p <= grid.n_l(); ++p) out.levels.push_back(sample_level(data, grid, p));
  out.psi.assign(I, Eigen::MatrixXd(grid.n_t() + 1, grid.n_x() + 1));
  out.g.assign(I, Eigen::MatrixXd(grid.n_l() + 1, grid.n_x() + 1));
  for (int i = 0; i < I; ++i)
    for (int j = 0; j <= grid.n_x(); ++j) {
      const double x = grid.space_node(j);
      for (int k = 0; k <= grid.n_t(); ++k)
        out.psi[i](k, j) = checked(data.psi[i], "psi", i, grid.time_node(k), x, grid.l_max());
      for (int p = 0; p <= grid.n_l(); ++p)
        out.g[i](p, j) = checked(data.g[i], "g", i, 0.0, x, grid.level_node(p));
    }
  return out;
}

}  // namespace starnet
