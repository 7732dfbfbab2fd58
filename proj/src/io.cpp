#include "starnet/io.hpp"

#include "starnet/expression.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace starnet {

using nlohmann::json;

namespace {

class Reader {
 public:
  Reader(const json& doc, std::string origin) : doc_(doc), origin_(std::move(origin)) {
    if (!doc_.is_object()) fail("top level must be an object");
  }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(origin_ + ": " + what); }

  void reject_unknown(const std::set<std::string>& allowed) const {
    for (const auto& [key, _] : doc_.items())
      if (!allowed.count(key)) fail("unknown field '" + key + "'");
  }

  const json& need(const std::string& key) const {
    auto it = doc_.find(key);
    if (it == doc_.end()) fail("missing field '" + key + "'");
    return *it;
  }
  bool has(const std::string& key) const { return doc_.contains(key); }

  double number(const std::string& key) const {
    const json& v = need(key);
    if (!v.is_number()) fail("field '" + key + "' must be a number");
    return v.get<double>();
  }
  double number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  int integer(const std::string& key) const {
    const json& v = need(key);
    if (!v.is_number_integer()) fail("field '" + key + "' must be an integer");
    return v.get<int>();
  }

  std::string string_or(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = need(key);
    if (!v.is_string()) fail("field '" + key + "' must be a string");
    return v.get<std::string>();
  }

  CoefficientField field(const json& v, const std::string& key) const {
    try {
      if (v.is_number()) return CoefficientField::constant(v.get<double>());
      if (v.is_string()) return CoefficientField::from_expression(v.get<std::string>());
      if (v.is_object()) {
        for (const auto& [k, _] : v.items())
          if (k != "expr" && k != "sup" && k != "lip") fail("field '" + key + "': unknown key '" + k + "'");
        if (!v.contains("expr")) fail("field '" + key + "' object needs 'expr'");
        CoefficientField out = field(v.at("expr"), key);
        if (v.contains("sup")) out.declared_sup = v.at("sup").get<double>();
        if (v.contains("lip")) out.declared_lip = v.at("lip").get<double>();
        return out;
      }
    } catch (const ExpressionError& e) {
      fail("field '" + key + "': " + e.what());
    } catch (const json::exception& e) {
      fail("field '" + key + "': " + e.what());
    }
    fail("field '" + key + "' must be a number, an expression string or an object");
  }

  CoefficientField scalar_field(const std::string& key) const {
    const json& v = need(key);
    if (v.is_array()) fail("field '" + key + "' is not per-ray");
    return field(v, key);
  }

  RayFields ray_fields(const std::string& key, int rays) const {
    const json& v = need(key);
    RayFields out;
    if (v.is_array()) {
      if (static_cast<int>(v.size()) != rays)
        fail("field '" + key + "' has " + std::to_string(v.size()) + " entries, expected " + std::to_string(rays));
      for (const auto& item : v) out.push_back(field(item, key));
    } else {
      out.assign(rays, field(v, key));
    }
    return out;
  }

  std::map<std::string, double> declared_norms() const {
    std::map<std::string, double> out;
    if (!has("declared_norms")) return out;
    const json& v = need("declared_norms");
    if (!v.is_object()) fail("declared_norms must be an object");
    for (const auto& [k, val] : v.items()) {
      if (!val.is_number()) fail("declared_norms." + k + " must be a number");
      out[k] = val.get<double>();
    }
    return out;
  }

  std::optional<GridCounts> grid() const {
    if (!has("grid")) return std::nullopt;
    const json& v = need("grid");
    if (!v.is_object()) fail("grid must be an object");
    GridCounts g;
    for (const auto& [k, val] : v.items()) {
      if (!val.is_number_integer()) fail("grid." + k + " must be an integer");
      if (k == "n_t") g.n_t = val.get<int>();
      else if (k == "n_x") g.n_x = val.get<int>();
      else if (k == "n_l") g.n_l = val.get<int>();
      else fail("grid: unknown field '" + k + "'");
    }
    return g;
  }

  StarNetwork network() const {
    try {
      return StarNetwork(integer("rays"), number("ray_length"));
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }

 private:
  const json& doc_;
  std::string origin_;
};

}  // namespace

LoadedProblem parse_problem(const json& doc, const std::string& origin) {
  Reader in(doc, origin);
  LoadedProblem out;
  const std::string kind = in.string_or("kind", "");
  const std::set<std::string> common{"kind", "name", "description", "rays", "ray_length", "horizon", "a", "b",
                                     "c", "f", "alpha", "g", "a_floor", "alpha_floor", "exact", "declared_norms",
                                     "grid"};
  out.grid = in.grid();
  out.description = in.string_or("description", "");
  if (kind == "local_time") {
    std::set<std::string> allowed = common;
    allowed.insert({"l_max", "r", "phi", "psi", "g_l_junction"});
    in.reject_unknown(allowed);
    out.kind = LoadedProblem::Kind::LocalTime;
    ProblemData& d = out.local;
    d.name = in.string_or("name", origin);
    d.network = in.network();
    const int I = d.network.ray_count;
    d.horizon = in.number_or("horizon", 1.0);
    d.l_max = in.number_or("l_max", 1.0);
    d.a = in.ray_fields("a", I);
    d.b = in.ray_fields("b", I);
    d.c = in.ray_fields("c", I);
    d.f = in.ray_fields("f", I);
    d.alpha = in.ray_fields("alpha", I);
    d.psi = in.ray_fields("psi", I);
    d.g = in.ray_fields("g", I);
    d.r = in.scalar_field("r");
    d.phi = in.scalar_field("phi");
    d.a_floor = in.number("a_floor");
    d.alpha_floor = in.number("alpha_floor");
    if (in.has("g_l_junction")) d.g_l_junction = in.scalar_field("g_l_junction");
    if (in.has("exact")) d.exact = in.ray_fields("exact", I);
    d.declared_norms = in.declared_norms();
  } else if (kind == "classical") {
    std::set<std::string> allowed = common;
    allowed.insert({"lambda", "gamma", "lambda_floor"});
    in.reject_unknown(allowed);
    out.kind = LoadedProblem::Kind::Classical;
    ClassicalProblemData& d = out.classical;
    d.name = in.string_or("name", origin);
    d.network = in.network();
    const int I = d.network.ray_count;
    d.horizon = in.number_or("horizon", 1.0);
    d.a = in.ray_fields("a", I);
    d.b = in.ray_fields("b", I);
    d.c = in.ray_fields("c", I);
    d.f = in.ray_fields("f", I);
    d.alpha = in.ray_fields("alpha", I);
    d.g = in.ray_fields("g", I);
    d.lambda = in.scalar_field("lambda");
    d.gamma = in.scalar_field("gamma");
    d.a_floor = in.number("a_floor");
    d.alpha_floor = in.number("alpha_floor");
    d.lambda_floor = in.number("lambda_floor");
    if (in.has("exact")) d.exact = in.ray_fields("exact", I);
    d.declared_norms = in.declared_norms();
  } else {
    in.fail("field 'kind' must be \"local_time\" or \"classical\"");
  }
  return out;
}

LoadedProblem load_problem(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError(path + ": cannot open problem file");
  json doc;
  try {
    doc = json::parse(file);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_problem(doc, path);
}

json json_number(double value) {
  if (std::isfinite(value)) return value;
  if (std::isnan(value)) return "nan";
  return value > 0 ? "inf" : "-inf";
}

json to_json(const ValidationReport& report) {
  auto entry = [](const ValidationEntry& e) {
    return json{{"name", e.name},
                {"kind", e.kind == ValidationEntry::Kind::Floor ? "floor" : "equality"},
                {"margin", json_number(e.margin)},
                {"tolerance", json_number(e.tolerance)},
                {"pass", e.pass},
                {"where", e.where}};
  };
  json out{{"pass", report.pass()}, {"entries", json::array()}, {"declared_bound_warnings", json::array()}};
  for (const auto& e : report.entries) out["entries"].push_back(entry(e));
  for (const auto& e : report.declared_bound_warnings) out["declared_bound_warnings"].push_back(entry(e));
  return out;
}

json to_json(const ConstantSet& constants) {
  json out{{"constants", json::object()}, {"inputs", json::object()}, {"input_sources", json::object()}};
  for (const auto& [name, value] : constants.evaluated()) out["constants"][name] = json_number(value);
  for (const auto& [name, value] : constants.inputs.values) out["inputs"][name] = json_number(value);
  for (const auto& [name, source] : constants.inputs.sources) out["input_sources"][name] = source;
  return out;
}

json to_json(const CertificateReport& report) {
  json out{{"pass", report.pass()}, {"entries", json::array()}};
  for (const auto& e : report.entries)
    out["entries"].push_back(json{{"name", e.name},
                                  {"constant", json_number(e.constant)},
                                  {"observed", json_number(e.observed)},
                                  {"slack", e.slack},
                                  {"pass", e.pass},
                                  {"informational", e.informational}});
  return out;
}

json to_json(const SweepResult& sweep) {
  json out{{"axis", to_string(sweep.axis)},
           {"order", json_number(sweep.order)},
           {"reference", json{{"n_t", sweep.reference.n_t}, {"n_x", sweep.reference.n_x}, {"n_l", sweep.reference.n_l}}},
           {"runs", json::array()}};
  for (std::size_t m = 0; m < sweep.grids.size(); ++m) {
    json run{{"n_t", sweep.grids[m].n_t},
             {"n_x", sweep.grids[m].n_x},
             {"n_l", sweep.grids[m].n_l},
             {"spacing", json_number(sweep.spacings[m])},
             {"error_vs_reference", json_number(sweep.errors[m])}};
    if (m < sweep.exact_errors.size()) run["error_vs_exact"] = json_number(sweep.exact_errors[m]);
    out["runs"].push_back(run);
  }
  return out;
}

}  // namespace starnet
