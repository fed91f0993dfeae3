#pragma once

// Batch driver: kantorov <command> --config <path> [--seed N] [--threads N]
// [--bounds id,...]. Exit status 0 on success, 1 on a failed check or a
// numeric failure, 2 on a configuration error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kantorov/analysis.hpp"
#include "kantorov/catalog.hpp"
#include "kantorov/errors.hpp"
#include "kantorov/kantorovich.hpp"
#include "kantorov/moduli.hpp"
#include "kantorov/parallel.hpp"
#include "kantorov/run_config.hpp"

namespace kantorov::cli {

inline constexpr const char* version = "0.1.0";

enum Exit { ok = 0, check_failed = 1, bad_config = 2 };

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

inline const char* error_row_header = "n,sup_error,lp_error,bound_id,bound_value,ratio,pass";

inline std::string csv_row(const ErrorRow& r) {
  std::string s = std::to_string(r.n) + "," + num(r.sup_error) + "," + num(r.lp_error) + "," + r.bound_id + "," +
                  num(r.bound_value) + "," + num(r.ratio) + ",";
  if (r.pass) s += *r.pass ? "true" : "false";
  return s;
}

inline json row_json(const ErrorRow& r) {
  json j;
  j["n"] = r.n;
  j["sup_error"] = r.sup_error ? json(*r.sup_error) : json(nullptr);
  j["lp_error"] = r.lp_error ? json(*r.lp_error) : json(nullptr);
  j["bound_id"] = r.bound_id;
  j["bound_value"] = r.bound_value ? json(*r.bound_value) : json(nullptr);
  j["ratio"] = r.ratio ? json(*r.ratio) : json(nullptr);
  j["pass"] = r.pass ? json(*r.pass) : json(nullptr);
  return j;
}

struct Outcome {
  std::vector<std::string> csv;  // header first
  json body = json::object();
  bool ok = true;
};

inline std::vector<int> require_n_list(const RunConfig& rc) {
  if (rc.experiment.n_list.empty()) throw config_error("experiment.n_list: required by command '" + rc.experiment.command + "'");
  return rc.experiment.n_list;
}

inline Outcome run_eval(const RunConfig& rc, std::ostream& out) {
  Outcome o;
  const Domain& domain = rc.op.domain;
  const auto ns = require_n_list(rc);
  const auto points = rc.experiment.points.empty() ? uniform_grid(domain, rc.experiment.grid_resolution) : rc.experiment.points;
  std::string header = "n";
  for (int i = 0; i < domain.dim(); ++i) header += ",x" + std::to_string(i + 1);
  o.csv.push_back(header + ",value,f");
  json rows = json::array();
  for (int n : ns) {
    const KantorovichEvaluator ev(rc.op, n, rc.function.field());
    for (const Point& x : points) {
      const double v = ev(x), fx = rc.function(x);
      std::string line = std::to_string(n);
      for (int i = 0; i < domain.dim(); ++i) line += "," + num(x[i]);
      o.csv.push_back(line + "," + num(v) + "," + num(fx));
      rows.push_back({{"n", n}, {"x", std::vector<double>(x.coords().begin(), x.coords().end())}, {"value", v}, {"f", fx}});
    }
    out << "n = " << n << ": evaluated C_n(f) at " << points.size() << " point(s)\n";
  }
  o.body["rows"] = rows;
  return o;
}

inline Outcome run_converge(const RunConfig& rc, std::ostream& out) {
  Outcome o;
  o.csv.push_back(error_row_header);
  json rows = json::array();
  const Field f = rc.function.field();
  for (int n : require_n_list(rc)) {
    ErrorRow r;
    r.n = n;
    r.sup_error = sup_error(rc.op, n, f, rc.experiment.grid_resolution);
    if (rc.experiment.p) r.lp_error = lp_error(rc.op, n, f, *rc.experiment.p, rc.experiment.quad_level);
    o.csv.push_back(csv_row(r));
    rows.push_back(row_json(r));
    out << "n = " << n << "  sup_error = " << num(*r.sup_error);
    if (r.lp_error) out << "  lp_error = " << num(*r.lp_error);
    out << "\n";
  }
  o.body["rows"] = rows;
  return o;
}

inline Outcome run_verify(const RunConfig& rc, std::ostream& out) {
  Outcome o;
  o.csv.push_back(error_row_header);
  json rows = json::array(), reports = json::array();
  const auto ns = require_n_list(rc);
  std::mt19937_64 rng(rc.experiment.seed);
  constexpr double affine_tol = 1e-10, quadratic_tol = 1e-9;
  for (int n : ns) {
    const MomentCheck mc = moment_oracle_check(rc.op, n, 50, 20, rng);
    for (auto [id, dev, tol] : {std::tuple{"moment_affine", mc.affine_deviation, affine_tol},
                                std::tuple{"moment_quadratic", mc.quadratic_deviation, quadratic_tol}}) {
      ErrorRow r;
      r.n = n;
      r.bound_id = id;
      r.sup_error = dev;
      r.bound_value = tol;
      r.ratio = dev / tol;
      r.pass = dev <= tol;
      o.ok = o.ok && *r.pass;
      o.csv.push_back(csv_row(r));
      rows.push_back(row_json(r));
    }
  }
  out << "moment oracle: " << (o.ok ? "pass" : "FAIL") << "\n";
  BoundOptions opt;
  opt.grid = rc.experiment.grid_resolution;
  opt.modulus_grid = rc.experiment.modulus_grid;
  opt.level = rc.experiment.quad_level;
  opt.p = rc.experiment.p.value_or(1.0);
  for (const std::string& id : rc.experiment.bounds) {
    const BoundReport rep = check_bound(rc.op, rc.function, ns, id, opt);
    for (const auto& r : rep.rows) {
      o.csv.push_back(csv_row(r));
      rows.push_back(row_json(r));
    }
    reports.push_back({{"bound_id", rep.bound_id}, {"n_min", rep.n_min}, {"n_max", rep.n_max},
                       {"max_ratio", rep.max_ratio}, {"tolerance", rep.tolerance}, {"pass", rep.pass}});
    o.ok = o.ok && rep.pass;
    out << id << ": max ratio " << num(rep.max_ratio) << " over n in [" << rep.n_min << ", " << rep.n_max << "] -> "
        << (rep.pass ? "pass" : "FAIL") << "\n";
  }
  o.body["rows"] = rows;
  o.body["reports"] = reports;
  return o;
}

inline ConvexityMode preserved_mode(const Domain& domain) {
  switch (domain.kind()) {
    case DomainKind::interval: return ConvexityMode::convex;
    case DomainKind::hypercube: return ConvexityMode::coordinate_convex;
    case DomainKind::simplex: return ConvexityMode::axially_convex;
  }
  return ConvexityMode::convex;
}

inline Outcome run_preserve(const RunConfig& rc, std::ostream& out) {
  Outcome o;
  o.csv.push_back(error_row_header);
  json rows = json::array();
  const CatalogFunction& f = rc.function;
  const Domain& domain = rc.op.domain;
  const int m = rc.experiment.grid_resolution;
  constexpr double tol = 1e-10;
  const ConvexityMode mode = preserved_mode(domain);
  const bool has_shape = mode == ConvexityMode::convex             ? f.meta.convex
                         : mode == ConvexityMode::coordinate_convex ? f.meta.coordinate_convex
                                                                    : f.meta.axially_convex;
  auto push = [&](ErrorRow r) {
    o.ok = o.ok && r.pass.value_or(true);
    o.csv.push_back(csv_row(r));
    rows.push_back(row_json(r));
    out << "n = " << r.n << "  " << r.bound_id << ": " << num(r.sup_error) << " -> "
        << (r.pass.value_or(true) ? "pass" : "FAIL") << "\n";
  };
  for (int n : require_n_list(rc)) {
    if (has_shape) {
      const KantorovichEvaluator ev(rc.op, n, f.field());
      const auto rep = convexity_report(Field([&](const Point& x) { return ev(x); }), domain, mode, m, tol);
      ErrorRow r;
      r.n = n;
      r.bound_id = "shape_" + to_string(mode);
      r.sup_error = std::max(0.0, rep.worst);
      r.bound_value = tol;
      r.pass = rep.pass;
      push(r);
    }
    if (f.meta.convex) {
      const auto rep = sandwich_check(rc.op, n, f.field(), m, tol);
      ErrorRow r;
      r.n = n;
      r.bound_id = "sandwich";
      r.sup_error = std::max({rep.lower_violation, rep.upper_violation, rep.operator_violation});
      r.bound_value = tol;
      r.pass = rep.pass;
      push(r);
    }
    if (f.meta.lipschitz_l1) {
      const auto rep = lipschitz_preservation(rc.op, n, f, std::min(m, 64));
      ErrorRow r;
      r.n = n;
      r.bound_id = "lipschitz_l1";
      r.sup_error = rep.estimate;
      r.bound_value = rep.constant;
      r.ratio = rep.constant > 0.0 ? rep.estimate / rep.constant : 0.0;
      r.pass = rep.pass;
      push(r);
    }
  }
  if (rows.empty()) out << "function '" << f.name << "' carries no shape metadata to check\n";
  o.body["rows"] = rows;
  return o;
}

inline Outcome run_moduli(const RunConfig& rc, std::ostream& out) {
  Outcome o;
  const auto& e = rc.experiment;
  if (e.deltas.empty()) throw config_error("experiment.deltas: required by command 'moduli'");
  const double p = e.p.value_or(1.0);
  const Field f = rc.function.field();
  const Domain& domain = rc.op.domain;
  const int m = e.modulus_grid;
  o.csv.push_back("delta,omega1,omega2,tau_p,omega_kp,total_modulus_upper");
  json rows = json::array();
  for (double delta : e.deltas) {
    const double w1 = omega1(f, domain, delta, m), w2 = omega2(f, domain, delta, m),
                 tp = tau_p(f, domain, delta, p, m), wk = omega_kp(f, domain, e.k, delta, p, m, e.seed),
                 tot = total_modulus_upper(f, domain, delta, m);
    o.csv.push_back(num(delta) + "," + num(w1) + "," + num(w2) + "," + num(tp) + "," + num(wk) + "," + num(tot));
    rows.push_back({{"delta", delta}, {"omega1", w1}, {"omega2", w2}, {"tau_p", tp}, {"omega_kp", wk},
                    {"total_modulus_upper", tot}});
    out << "delta = " << num(delta) << "  omega1 = " << num(w1) << "  omega2 = " << num(w2) << "\n";
  }
  o.body["rows"] = rows;
  return o;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

/// Runs one command; returns the process exit status.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Generalized Kantorovich operator experiments", "kantorov"};
  std::string command, config_path, bounds;
  std::optional<long long> seed;
  int threads = 1;
  app.add_option("command", command, "eval, converge, verify, preserve or moduli")->required();
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--seed", seed, "RNG seed (overrides experiment.seed)");
  app.add_option("--threads", threads, "worker threads (0: hardware concurrency)");
  app.add_option("--bounds", bounds, "comma-separated bound ids (overrides experiment.bounds)");
  app.set_version_flag("--version", version);
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForVersion&) {
    out << version << "\n";
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return bad_config;
  }

  const auto start = std::chrono::steady_clock::now();
  RunConfig rc;
  try {
    if (std::find(command_names().begin(), command_names().end(), command) == command_names().end())
      throw config_error("unknown command '" + command + "'");
    rc = load_run_config(config_path);
    rc.experiment.command = command;
    if (seed) {
      if (*seed < 0) throw config_error("--seed: must be >= 0");
      rc.experiment.seed = static_cast<std::uint64_t>(*seed);
    }
    if (!bounds.empty()) {
      rc.experiment.bounds.clear();
      std::stringstream ss(bounds);
      for (std::string id; std::getline(ss, id, ',');) {
        if (std::find(bound_ids().begin(), bound_ids().end(), id) == bound_ids().end())
          throw config_error("--bounds: unknown bound '" + id + "'");
        rc.experiment.bounds.push_back(id);
      }
    }
    set_worker_count(threads);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return bad_config;
  }

  try {
    Outcome o;
    if (command == "eval") o = run_eval(rc, out);
    else if (command == "converge") o = run_converge(rc, out);
    else if (command == "verify") o = run_verify(rc, out);
    else if (command == "preserve") o = run_preserve(rc, out);
    else o = run_moduli(rc, out);

    if (!rc.output.csv_path.empty()) {
      std::string text;
      for (const auto& line : o.csv) text += line + "\n";
      write_file(rc.output.csv_path, text);
    }
    if (!rc.output.json_path.empty()) {
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      json doc = o.body;
      doc["meta"] = {{"config", rc.raw}, {"command", command}, {"seed", rc.experiment.seed},
                     {"version", version}, {"wall_time_s", wall}, {"pass", o.ok}};
      write_file(rc.output.json_path, doc.dump(2) + "\n");
    }
    out << (o.ok ? "ok" : "FAILED") << "\n";
    return o.ok ? ok : check_failed;
  } catch (const config_error& e) {
    err << "config error: " << e.what() << "\n";
    return bad_config;
  } catch (const kantorov::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return bad_config;
  } catch (const numeric_error& e) {
    err << "numeric failure: " << e.what() << "\n";
    return check_failed;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return check_failed;
  }
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}

}  // namespace kantorov::cli
