#include "artifacts.hpp"

#include "starnet/certificates.hpp"
#include "starnet/io.hpp"
#include "starnet/local_time.hpp"
#include "starnet/rothe.hpp"
#include "starnet/verification.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

using namespace starnet;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kConfig = 2, kValidation = 3, kCheck = 4, kSolver = 5 };

struct RunConfig {
  std::string mode;
  std::string problem;
  std::optional<int> n_t, n_x, n_l;
  std::string scheme = "upwind";
  double slack = 0.05;
  std::string out = "starnet_out";
  bool naive_beta = false;
  int threads = 1;
};

struct Failure {
  Exit code;
  std::string reason;
  std::string message;
};

const char* exit_name(Exit e) {
  switch (e) {
    case kOk: return "ok";
    case kConfig: return "config";
    case kValidation: return "validation";
    case kCheck: return "check";
    case kSolver: return "solver";
  }
  return "unknown";
}

class Runner {
 public:
  Runner(RunConfig config, LoadedProblem problem, cli::ArtifactWriter& out)
      : cfg_(std::move(config)), lp_(std::move(problem)), out_(out), scheme_(parse_convection(cfg_.scheme)) {
    const GridCounts doc = lp_.grid.value_or(GridCounts{});
    counts_ = {cfg_.n_t.value_or(doc.n_t), cfg_.n_x.value_or(doc.n_x), cfg_.n_l.value_or(doc.n_l)};
    try {
      if (local())
        grid_ = GridSpec(lp_.local.network, lp_.local.horizon, lp_.local.l_max, counts_.n_t, counts_.n_x, counts_.n_l);
      else
        grid_ = GridSpec(lp_.classical.network, lp_.classical.horizon, 1.0, counts_.n_t, counts_.n_x, 1);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("grid: ") + e.what());
    }
  }

  Exit run() {
    const ValidationReport report =
        local() ? validate_assumptions(lp_.local, grid_) : validate_classical(lp_.classical, grid_);
    out_.write_json("validation.json", to_json(report));
    summary_["validation"] = report.pass() ? "pass" : "fail";
    if (!report.pass()) {
      reason_ = first_failure(report);
      return kValidation;
    }
    if (cfg_.mode == "validate") return kOk;
    if (cfg_.mode == "solve-local-time") return solve_local_time();
    if (cfg_.mode == "solve-classical") return solve_classical();
    if (cfg_.mode == "certify") return certify_mode();
    if (cfg_.mode == "converge") return converge();
    if (cfg_.mode == "compare") return compare();
    throw ConfigError("unknown mode '" + cfg_.mode + "'");
  }

  const std::map<std::string, std::string>& summary() const { return summary_; }
  const std::string& reason() const { return reason_; }
  json grid_json() const { return {{"n_t", grid_.n_t()}, {"n_x", grid_.n_x()}, {"n_l", local() ? grid_.n_l() : 0}}; }

 private:
  bool local() const { return lp_.kind == LoadedProblem::Kind::LocalTime; }

  void need(LoadedProblem::Kind kind) const {
    if (lp_.kind != kind)
      throw ConfigError("mode " + cfg_.mode + " needs a " +
                        (kind == LoadedProblem::Kind::LocalTime ? "local_time" : "classical") + " problem");
  }

  static std::string first_failure(const ValidationReport& report) {
    for (const auto& e : report.entries)
      if (!e.pass) return e.name + " (margin " + std::to_string(e.margin) + ", " + e.where + ")";
    return "validation failed";
  }

  static std::string series_csv(const GridSpec& grid, const FieldSeries& fields) {
    cli::CsvTable csv({"t", "ray", "x", "u"});
    for (int k = 0; k <= grid.n_t(); ++k)
      for (int i = 0; i < grid.rays(); ++i)
        for (int j = 0; j <= grid.n_x(); ++j) {
          csv.cell(grid.time_node(k)).cell(long(i)).cell(grid.space_node(j)).cell(fields[k](i, j));
          csv.end_row();
        }
    return csv.str();
  }

  SolutionCube solve_cube() const {
    BackwardOptions options;
    options.naive_beta = cfg_.naive_beta;
    return run_backward(lp_.local, grid_, scheme_, options);
  }

  void write_cube(const SolutionCube& cube) {
    for (int p = 0; p <= grid_.n_l(); ++p) {
      char name[32];
      std::snprintf(name, sizeof name, "levels/level_%04d.csv", p);
      out_.write_text(name, series_csv(grid_, cube.levels[p]));
    }
  }

  Exit solve_local_time() {
    need(LoadedProblem::Kind::LocalTime);
    const SolutionCube cube = solve_cube();
    write_cube(cube);
    const KirchhoffResidual res = kirchhoff_residual(cube, lp_.local, grid_);
    cli::CsvTable csv({"t", "l", "residual"});
    for (int p = 0; p < grid_.n_l(); ++p)
      for (int k = 0; k <= grid_.n_t(); ++k) {
        csv.cell(grid_.time_node(k)).cell(grid_.level_node(p)).cell(res.table(p, k));
        csv.end_row();
      }
    out_.write_text("kirchhoff_residual.csv", csv.str());

    const LocalTimeObservations o = observe(cube);
    json doc{{"scheme", to_string(scheme_)},
             {"naive_beta", cfg_.naive_beta},
             {"grid", grid_json()},
             {"sup", json_number(o.sup)},
             {"kirchhoff_residual_sup", json_number(res.sup)},
             {"kirchhoff_residual_sup_interior", json_number(res.sup_interior)},
             {"beta", beta_constants(lp_.local, grid_).beta}};
    if (lp_.local.exact) {
      const ErrorNorms e = error_norms(cube, *lp_.local.exact);
      doc["error_vs_exact"] = {{"sup", json_number(e.sup)}, {"rms", json_number(e.rms)}};
      summary_["error vs exact (sup)"] = std::to_string(e.sup);
    }
    out_.write_json("solve.json", doc);
    summary_["sup |u|"] = std::to_string(o.sup);
    summary_["Kirchhoff residual (p <= n_l-2)"] = std::to_string(res.sup_interior);
    return kOk;
  }

  Exit solve_classical() {
    need(LoadedProblem::Kind::Classical);
    const Trajectory traj = march_classical(lp_.classical, grid_, scheme_);
    out_.write_text("solution.csv", series_csv(grid_, traj.fields));
    const ClassicalObservations o = observe(traj);
    json doc{{"scheme", to_string(scheme_)},
             {"grid", grid_json()},
             {"sup", json_number(o.sup)},
             {"time_quotient", json_number(o.time_quotient)},
             {"junction_quotient", json_number(o.junction_quotient)},
             {"gradient", json_number(o.gradient)}};
    if (lp_.classical.exact) {
      const ErrorNorms e = error_norms(traj, *lp_.classical.exact);
      doc["error_vs_exact"] = {{"sup", json_number(e.sup)}, {"rms", json_number(e.rms)}};
      summary_["error vs exact (sup)"] = std::to_string(e.sup);
    }
    out_.write_json("solve.json", doc);
    summary_["sup |u|"] = std::to_string(o.sup);
    return kOk;
  }

  Exit certify_mode() {
    CertificateRun run;
    if (local()) {
      const SolutionCube cube = solve_cube();
      run = certify_run(lp_.local, cube, cfg_.slack);
    } else {
      run = certify_run(lp_.classical, march_classical(lp_.classical, grid_, scheme_), cfg_.slack);
    }
    json doc = to_json(run.constants);
    doc["report"] = to_json(run.report);
    doc["slack"] = cfg_.slack;
    doc["scheme"] = to_string(scheme_);
    doc["grid"] = grid_json();
    out_.write_json("certificate.json", doc);
    for (const auto& e : run.report.entries)
      summary_[e.name] = std::string(e.pass ? "pass" : e.informational ? "info" : "FAIL") + " (observed " +
                         std::to_string(e.observed) + ", bound " + std::to_string(e.constant) + ")";
    if (run.report.pass()) return kOk;
    reason_ = run.report.summary();
    return kCheck;
  }

  Exit converge() {
    need(LoadedProblem::Kind::LocalTime);
    const GridCounts base = counts_;
    const GridCounts held{4 * base.n_t, 4 * base.n_x, 4 * base.n_l};
    const double expected[] = {1.0, scheme_ == Convection::Centered ? 2.0 : 1.0, 1.0};
    cli::CsvTable csv({"axis", "n_t", "n_x", "n_l", "spacing", "error_vs_reference", "error_vs_exact"});
    json doc{{"scheme", to_string(scheme_)}, {"tolerance", 0.3}, {"sweeps", json::array()}};
    bool pass = true;
    int a = 0;
    for (RefineAxis axis : {RefineAxis::Time, RefineAxis::Space, RefineAxis::Level}) {
      const SweepResult s = refinement_sweep(lp_.local, axis, base, held, 3, scheme_, 8, cfg_.threads);
      for (std::size_t m = 0; m < s.grids.size(); ++m) {
        csv.cell(std::string(to_string(axis)))
            .cell(long(s.grids[m].n_t))
            .cell(long(s.grids[m].n_x))
            .cell(long(s.grids[m].n_l))
            .cell(s.spacings[m])
            .cell(s.errors[m]);
        if (m < s.exact_errors.size()) csv.cell(s.exact_errors[m]);
        else csv.cell(std::string());
        csv.end_row();
      }
      const bool ok = std::abs(s.order - expected[a]) <= 0.3;
      pass = pass && ok;
      json entry = to_json(s);
      entry["expected_order"] = expected[a];
      entry["pass"] = ok;
      doc["sweeps"].push_back(entry);
      summary_[std::string("order ") + to_string(axis)] =
          std::to_string(s.order) + " (expected " + std::to_string(expected[a]) + ")";
      ++a;
    }
    doc["pass"] = pass;
    out_.write_text("convergence.csv", csv.str());
    out_.write_json("convergence.json", doc);
    if (pass) return kOk;
    reason_ = "observed order outside expected +- 0.3";
    return kCheck;
  }

  Exit compare() {
    const CoefficientField one = CoefficientField::constant(1.0), zero = CoefficientField::constant(0.0);
    auto test = [&](const CoefficientField& bump, const CoefficientField& drop) {
      return local() ? comparison_test(lp_.local, grid_, bump, drop) : comparison_test(lp_.classical, grid_, bump, drop);
    };
    const ComparisonResult raise = test(one, zero), lower = test(zero, one);
    auto entry = [](const ComparisonResult& r) {
      return json{{"pass", r.pass}, {"worst_violation", json_number(r.worst_violation)}, {"where", r.where}};
    };
    const std::string lowered = local() ? "phi_minus_1" : "gamma_minus_1";
    out_.write_json("comparison.json", {{"f_plus_1", entry(raise)}, {lowered, entry(lower)}, {"tolerance", 1e-10}});
    summary_["comparison f+1"] = std::to_string(raise.worst_violation);
    summary_["comparison " + lowered] = std::to_string(lower.worst_violation);
    if (raise.pass && lower.pass) return kOk;
    reason_ = "comparison violated at " + (raise.pass ? lower.where : raise.where);
    return kCheck;
  }

  RunConfig cfg_;
  LoadedProblem lp_;
  cli::ArtifactWriter& out_;
  Convection scheme_;
  GridCounts counts_;
  GridSpec grid_;
  std::map<std::string, std::string> summary_;
  std::string reason_;
};

int report_failure(const Failure& f) {
  std::cerr << "error " << json{{"exit", int(f.code)}, {"reason", f.reason}, {"message", f.message}}.dump() << "\n";
  return f.code;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Parabolic problems on star networks with local-time junction dynamics"};
  app.add_option("--mode", cfg.mode, "run mode")
      ->required()
      ->check(CLI::IsMember({"solve-classical", "solve-local-time", "certify", "converge", "compare", "validate"}));
  app.add_option("--problem", cfg.problem, "problem document (JSON)")->required();
  app.add_option("--nt", cfg.n_t, "time intervals")->check(CLI::PositiveNumber);
  app.add_option("--nx", cfg.n_x, "space intervals per ray")->check(CLI::PositiveNumber);
  app.add_option("--nl", cfg.n_l, "local-time intervals")->check(CLI::PositiveNumber);
  app.add_option("--scheme", cfg.scheme, "convection discretization")
      ->check(CLI::IsMember({"upwind", "centered"}))
      ->capture_default_str();
  app.add_option("--slack", cfg.slack, "relative certificate slack")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--out", cfg.out, "output directory")->capture_default_str();
  app.add_flag("--naive-beta", cfg.naive_beta, "drop the junction compatibility constants (negative test)");
  app.add_option("--threads", cfg.threads, "worker threads for sweeps")->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_failure({kConfig, "config", e.what()});
  }

  std::optional<Runner> runner;
  std::optional<cli::ArtifactWriter> out;
  Exit code = kOk;
  try {
    LoadedProblem problem = load_problem(cfg.problem);
    out.emplace(cfg.out);
    runner.emplace(cfg, std::move(problem), *out);
    code = runner->run();
  } catch (const ConfigError& e) {
    return report_failure({kConfig, "config", e.what()});
  } catch (const AssumptionViolation& e) {
    code = kValidation;
    if (out) out->write_json("validation.json", to_json(e.report()));
    if (out) out->finish({{"mode", cfg.mode}, {"problem", cfg.problem}, {"timestamp", cli::utc_timestamp()}});
    return report_failure({kValidation, "validation", e.what()});
  } catch (const std::exception& e) {
    return report_failure({kSolver, "solver", e.what()});
  }

  std::vector<std::string> args(argv, argv + argc);
  out->finish({{"argv", args},
               {"exit", int(code)},
               {"grid", runner->grid_json()},
               {"mode", cfg.mode},
               {"problem", cfg.problem},
               {"timestamp", cli::utc_timestamp()}});

  std::printf("starnet %s %s -> %s\n", cfg.mode.c_str(), cfg.problem.c_str(), cfg.out.c_str());
  for (const auto& [key, value] : runner->summary()) std::printf("  %-36s %s\n", key.c_str(), value.c_str());
  std::printf("  %-36s %s\n", "status", exit_name(code));
  if (code != kOk) return report_failure({code, exit_name(code), runner->reason()});
  return kOk;
}
