#pragma once

// JSON experiment configuration: domain, operator, function, experiment
// and output blocks, validated across fields at parse time.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kantorov/analysis.hpp"
#include "kantorov/catalog.hpp"
#include "kantorov/errors.hpp"
#include "kantorov/kantorovich.hpp"
#include "kantorov/measures.hpp"

namespace kantorov {

using json = nlohmann::json;

struct ExperimentSpec {
  std::string command;
  std::vector<int> n_list;
  int grid_resolution = 100;
  std::optional<double> p;
  int quad_level = 8;
  std::vector<std::string> bounds;
  std::vector<Point> points;
  std::vector<double> deltas;
  int k = 2;
  int modulus_grid = 400;
  std::uint64_t seed = 42;
};

struct OutputSpec {
  std::string csv_path;
  std::string json_path;
};

struct RunConfig {
  OperatorConfig op;
  CatalogFunction function;
  ExperimentSpec experiment;
  OutputSpec output;
  json raw;
};

namespace detail {

inline const json& require_key(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw config_error(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw config_error(path + "." + key + ": missing");
  return *it;
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw config_error(path + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw config_error(path + ": not finite");
  return v;
}

inline int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !(j.is_number() && j.get<double>() == std::floor(j.get<double>())))
    throw config_error(path + ": expected an integer");
  const double v = j.get<double>();
  if (std::abs(v) > 1e9) throw config_error(path + ": out of range");
  return static_cast<int>(v);
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw config_error(path + ": expected a string");
  return j.get<std::string>();
}

inline std::vector<double> as_numbers(const json& j, const std::string& path) {
  if (!j.is_array()) throw config_error(path + ": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline Point as_point(const json& j, const Domain& domain, const std::string& path) {
  const auto v = as_numbers(j, path);
  if (static_cast<int>(v.size()) != domain.dim())
    throw config_error(path + ": expected " + std::to_string(domain.dim()) + " coordinates");
  const Point x{std::span<const double>(v)};
  if (!contains(domain, x)) throw config_error(path + ": point " + to_string(x) + " outside " + domain.name());
  return x;
}

inline Domain parse_domain(const json& j) {
  const std::string kind = as_string(require_key(j, "kind", "domain"), "domain.kind");
  int dim = 1;
  if (j.contains("dim")) dim = as_int(j["dim"], "domain.dim");
  try {
    if (kind == "interval") {
      if (dim != 1) throw config_error("domain.dim: the interval has dimension 1");
      return Domain::interval();
    }
    if (kind == "hypercube") return Domain::hypercube(dim);
    if (kind == "simplex") return Domain::simplex(dim);
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    throw config_error(std::string("domain: ") + e.what());
  }
  throw config_error("domain.kind: unknown kind '" + kind + "' (interval, hypercube, simplex)");
}

inline DiscreteMeasure parse_discrete(const json& j, const Domain& domain, const std::string& path) {
  const json& atoms = require_key(j, "atoms", path);
  if (!atoms.is_array() || atoms.empty()) throw config_error(path + ".atoms: expected a nonempty array");
  std::vector<Point> pts;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    pts.push_back(as_point(atoms[i], domain, path + ".atoms[" + std::to_string(i) + "]"));
  auto w = as_numbers(require_key(j, "weights", path), path + ".weights");
  try {
    return DiscreteMeasure(domain, pts, w);
  } catch (const std::exception& e) {
    throw config_error(path + ": " + e.what());
  }
}

inline BaseMeasure parse_base(const json& j, const Domain& domain, const std::string& path) {
  const std::string kind = as_string(require_key(j, "kind", path), path + ".kind");
  if (kind == "lebesgue") return LebesgueMeasure{};
  if (kind == "discrete") return parse_discrete(j, domain, path);
  if (kind == "dirac") return DiscreteMeasure::dirac(domain, as_point(require_key(j, "point", path), domain, path + ".point"));
  throw config_error(path + ".kind: base measure must be lebesgue, discrete or dirac");
}

inline int power_exponent(const json& j, double a, const std::string& path) {
  if (j.contains("exponent")) return as_int(j["exponent"], path + ".exponent");
  if (a != std::floor(a) || a < 1) throw config_error(path + ": power measures need a positive integer a");
  return static_cast<int>(a);
}

inline MeasureSpec parse_spec(const json& j, const Domain& domain, double a, const std::string& path) {
  const std::string kind = as_string(require_key(j, "kind", path), path + ".kind");
  if (kind == "power")
    return PowerMeasure{parse_base(require_key(j, "base", path), domain, path + ".base"), power_exponent(j, a, path)};
  auto base = parse_base(j, domain, path);
  if (auto* d = std::get_if<DiscreteMeasure>(&base)) return *d;
  return LebesgueMeasure{};
}

inline MeasureSeq parse_measures(const json& j, const Domain& domain, double a) {
  const std::string path = "operator.measures";
  const std::string kind = as_string(require_key(j, "kind", path), path + ".kind");
  if (kind == "lebesgue") return ConstantLebesgue{};
  if (kind == "dirac") {
    if (!(a > 0.0)) throw config_error(path + ": Dirac measures require operator.a > 0");
    if (j.contains("point")) {
      const Point b = as_point(j["point"], domain, path + ".point");
      return DiracShift{[b](int) { return b; }};
    }
    const json& pts = require_key(j, "points", path);
    if (!pts.is_array() || pts.empty()) throw config_error(path + ".points: expected a nonempty array");
    ExplicitList list;
    for (std::size_t i = 0; i < pts.size(); ++i)
      list.list.push_back(DiscreteMeasure::dirac(domain, as_point(pts[i], domain, path + ".points[" + std::to_string(i) + "]")));
    return list;
  }
  if (kind == "power")
    return PowerOfBase{parse_base(require_key(j, "base", path), domain, path + ".base"), power_exponent(j, a, path)};
  if (kind == "explicit") {
    const json& items = require_key(j, "list", path);
    if (!items.is_array() || items.empty()) throw config_error(path + ".list: expected a nonempty array");
    ExplicitList list;
    for (std::size_t i = 0; i < items.size(); ++i)
      list.list.push_back(parse_spec(items[i], domain, a, path + ".list[" + std::to_string(i) + "]"));
    return list;
  }
  throw config_error(path + ".kind: unknown kind '" + kind + "' (lebesgue, dirac, power, explicit)");
}

inline MarkovKind parse_markov(const std::string& s) {
  if (s == "T1") return MarkovKind::T1;
  if (s == "Sd") return MarkovKind::Sd;
  if (s == "Td") return MarkovKind::Td;
  throw config_error("operator.markov: unknown operator '" + s + "' (T1, Sd, Td)");
}

}  // namespace detail

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"eval", "converge", "verify", "preserve", "moduli"};
  return names;
}

/// Parses and validates a configuration document.
inline RunConfig parse_run_config(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw config_error("config: expected a JSON object");
  RunConfig rc;
  rc.raw = j;
  const Domain domain = parse_domain(require_key(j, "domain", "config"));

  const json& op = require_key(j, "operator", "config");
  const double a = as_number(require_key(op, "a", "operator"), "operator.a");
  if (a < 0.0) throw config_error("operator.a: must be >= 0");
  MarkovOperator markov = MarkovOperator::canonical(domain);
  if (op.contains("markov")) {
    const MarkovKind kind = parse_markov(as_string(op["markov"], "operator.markov"));
    try {
      markov = MarkovOperator(kind, domain);
    } catch (const std::exception& e) {
      throw config_error(std::string("operator.markov: ") + e.what());
    }
  }
  MeasureSeq measures = ConstantLebesgue{};
  if (op.contains("measures")) measures = parse_measures(op["measures"], domain, a);

  const json empty = json::object();
  const json& ex = j.contains("experiment") ? j["experiment"] : empty;
  if (!ex.is_object()) throw config_error("experiment: expected an object");
  ExperimentSpec& e = rc.experiment;
  if (ex.contains("command")) {
    e.command = as_string(ex["command"], "experiment.command");
    if (std::find(command_names().begin(), command_names().end(), e.command) == command_names().end())
      throw config_error("experiment.command: unknown command '" + e.command + "'");
  }
  if (ex.contains("n_list")) {
    const auto& nl = ex["n_list"];
    if (!nl.is_array()) throw config_error("experiment.n_list: expected an array");
    for (std::size_t i = 0; i < nl.size(); ++i) {
      const int n = as_int(nl[i], "experiment.n_list[" + std::to_string(i) + "]");
      if (n < 1) throw config_error("experiment.n_list[" + std::to_string(i) + "]: must be >= 1");
      e.n_list.push_back(n);
    }
  }
  if (ex.contains("grid_resolution")) e.grid_resolution = as_int(ex["grid_resolution"], "experiment.grid_resolution");
  if (e.grid_resolution < 2) throw config_error("experiment.grid_resolution: must be >= 2");
  if (ex.contains("p") && !ex["p"].is_null()) {
    e.p = as_number(ex["p"], "experiment.p");
    if (*e.p < 1.0) throw config_error("experiment.p: must be >= 1");
  }
  if (ex.contains("quad_level")) e.quad_level = as_int(ex["quad_level"], "experiment.quad_level");
  if (op.contains("quad_level")) e.quad_level = as_int(op["quad_level"], "operator.quad_level");
  if (ex.contains("bounds")) {
    const auto& b = ex["bounds"];
    if (!b.is_array()) throw config_error("experiment.bounds: expected an array");
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::string id = as_string(b[i], "experiment.bounds[" + std::to_string(i) + "]");
      if (std::find(bound_ids().begin(), bound_ids().end(), id) == bound_ids().end())
        throw config_error("experiment.bounds[" + std::to_string(i) + "]: unknown bound '" + id + "'");
      e.bounds.push_back(id);
    }
  }
  if (ex.contains("points")) {
    const auto& pts = ex["points"];
    if (!pts.is_array()) throw config_error("experiment.points: expected an array");
    for (std::size_t i = 0; i < pts.size(); ++i)
      e.points.push_back(as_point(pts[i], domain, "experiment.points[" + std::to_string(i) + "]"));
  }
  if (ex.contains("deltas")) {
    e.deltas = as_numbers(ex["deltas"], "experiment.deltas");
    for (double d : e.deltas)
      if (!(d > 0.0)) throw config_error("experiment.deltas: entries must be > 0");
  }
  if (ex.contains("k")) e.k = as_int(ex["k"], "experiment.k");
  if (e.k < 1) throw config_error("experiment.k: must be >= 1");
  if (ex.contains("modulus_grid")) e.modulus_grid = as_int(ex["modulus_grid"], "experiment.modulus_grid");
  if (e.modulus_grid < 2) throw config_error("experiment.modulus_grid: must be >= 2");
  if (ex.contains("seed")) {
    const int s = as_int(ex["seed"], "experiment.seed");
    if (s < 0) throw config_error("experiment.seed: must be >= 0");
    e.seed = static_cast<std::uint64_t>(s);
  }

  rc.op = OperatorConfig{domain, markov, a, measures, e.quad_level};
  try {
    rc.op.validate();
  } catch (const config_error& err) {
    throw config_error(std::string("operator: ") + err.what());
  }
  if (const auto* list = std::get_if<ExplicitList>(&rc.op.measures)) {
    for (int n : e.n_list)
      if (static_cast<std::size_t>(n) > list->list.size())
        throw config_error("operator.measures: " + std::to_string(list->list.size()) +
                           " measures given but experiment.n_list asks for n = " + std::to_string(n));
  }
  const bool lp_bounds = std::any_of(e.bounds.begin(), e.bounds.end(), [](const std::string& id) {
    return id == "lambda_p_bound" || id == "lp_equibounded";
  });
  if (lp_bounds && !rc.op.lebesgue())
    throw config_error("experiment.bounds: L^p bounds require operator.measures.kind = lebesgue");
  if (std::find(e.bounds.begin(), e.bounds.end(), "lp_equibounded") != e.bounds.end() && !(a > 0.0))
    throw config_error("experiment.bounds: lp_equibounded requires operator.a > 0");

  const json& fn = require_key(j, "function", "config");
  const std::string name = as_string(require_key(fn, "name", "function"), "function.name");
  std::vector<double> params;
  if (fn.contains("params")) params = as_numbers(fn["params"], "function.params");
  try {
    rc.function = lookup(name, params, domain);
  } catch (const std::exception& err) {
    throw config_error(std::string("function: ") + err.what());
  }

  if (j.contains("output")) {
    const json& out = j["output"];
    if (!out.is_object()) throw config_error("output: expected an object");
    if (out.contains("csv_path")) rc.output.csv_path = as_string(out["csv_path"], "output.csv_path");
    if (out.contains("json_path")) rc.output.json_path = as_string(out["json_path"], "output.json_path");
  }
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw config_error(path + ": malformed JSON: " + e.what());
  }
  return parse_run_config(j);
}

}  // namespace kantorov
