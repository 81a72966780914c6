// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0
//
// corrugate command-line front end.  Talks to the library exclusively through
// the C API in corrugate/corrugate.h and owns the config grammar and the
// CSV/JSON artifact layouts.  All outputs are byte-stable for a fixed
// config/seed (floats printed with %.17g, JSON keys sorted, LF endings); the
// single exception is the manifest's wall_time_seconds field.

#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "corrugate/corrugate.h"
#include "json.hpp"

namespace {

using nlohmann::json;

// exit codes: 0 ok, 2 domain precondition, 3 config error,
// 4 statistical gate failure, 5 internal oracle inconsistency
int exit_code_of(crg_status st) {
  switch (st) {
    case CRG_OK: return 0;
    case CRG_ERR_INVALID: return 3;
    case CRG_ERR_DOMAIN: return 2;
    case CRG_ERR_TOO_LARGE: return 3;
    case CRG_ERR_NOT_PSD: return 5;
    case CRG_ERR_INTERNAL: return 5;
  }
  return 5;
}

[[noreturn]] void die(crg_status st, const std::string& context) {
  std::fprintf(stderr, "corrugate: %s: %s\n", context.c_str(), crg_last_error());
  std::exit(exit_code_of(st));
}

[[noreturn]] void die_config(const std::string& message) {
  std::fprintf(stderr, "corrugate: %s\n", message.c_str());
  std::exit(3);
}

void check(crg_status st, const std::string& context) {
  if (st != CRG_OK) die(st, context);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      die_config("cannot parse " + what + " entry '" + tok + "'");
    }
  }
  if (out.empty()) die_config(what + " must be a nonempty comma-separated list");
  return out;
}

std::vector<double> parse_t_grid(const std::string& text) {
  const auto grid = parse_number_list(text, "--t-grid");
  double prev = 0.0;
  for (double t : grid) {
    if (!(t > 0.0 && t <= 1.0)) die_config("--t-grid entries must lie in (0,1]");
    if (t < prev) die_config("--t-grid must be sorted");
    prev = t;
  }
  return grid;
}

std::vector<std::pair<std::string, double>> parse_kv_list(const std::string& text,
                                                          const std::string& what) {
  std::vector<std::pair<std::string, double>> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) die_config(what + " entry '" + tok + "' is not key=value");
    try {
      out.emplace_back(tok.substr(0, eq), std::stod(tok.substr(eq + 1)));
    } catch (const std::exception&) {
      die_config("cannot parse " + what + " value in '" + tok + "'");
    }
  }
  return out;
}

// rows of `columns` doubles from a CSV file, skipping non-numeric headers
std::vector<std::vector<double>> read_table(const std::string& path, size_t columns) {
  std::ifstream in(path);
  if (!in) die_config("cannot open file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> row;
    bool numeric = true;
    while (std::getline(ss, tok, ',')) {
      try {
        row.push_back(std::stod(tok));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) continue;
    if (row.size() != columns)
      die_config("file '" + path + "': expected " + std::to_string(columns) + " columns");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) die_config("file '" + path + "' holds no numeric rows");
  return rows;
}

struct CurveHandle {
  crg_curve* ptr = nullptr;
  ~CurveHandle() { crg_curve_destroy(ptr); }
};
struct MetricHandle {
  crg_metric* ptr = nullptr;
  ~MetricHandle() { crg_metric_destroy(ptr); }
};
struct FramesHandle {
  crg_frames* ptr = nullptr;
  ~FramesHandle() { crg_frames_destroy(ptr); }
};
struct PhaseHandle {
  crg_phase* ptr = nullptr;
  ~PhaseHandle() { crg_phase_destroy(ptr); }
};
struct MapHandle {
  crg_map* ptr = nullptr;
  ~MapHandle() { crg_map_destroy(ptr); }
};
struct EnsembleHandle {
  crg_ensemble* ptr = nullptr;
  ~EnsembleHandle() { crg_ensemble_destroy(ptr); }
};
struct EnumerationHandle {
  crg_enumeration* ptr = nullptr;
  ~EnumerationHandle() { crg_enumeration_destroy(ptr); }
};
struct BundleHandle {
  crg_bundle* ptr = nullptr;
  ~BundleHandle() { crg_bundle_destroy(ptr); }
};

// --curve grammar: name:key=value,...  or  tab:file.csv (rows u,x,y,z)
void make_curve(const std::string& spec, CurveHandle& out) {
  const auto colon = spec.find(':');
  const std::string name = colon == std::string::npos ? spec : spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (name == "tab") {
    const auto rows = read_table(rest, 4);
    std::vector<double> us;
    std::vector<double> pts;
    for (const auto& r : rows) {
      us.push_back(r[0]);
      pts.insert(pts.end(), {r[1], r[2], r[3]});
    }
    check(crg_curve_create_tabulated(us.data(), pts.data(), us.size(), &out.ptr),
          "creating tabulated curve");
    return;
  }
  const auto kv = parse_kv_list(rest, "curve parameters");
  std::vector<std::string> keys;
  std::vector<const char*> key_ptrs;
  std::vector<double> values;
  for (const auto& [k, v] : kv) {
    keys.push_back(k);
    values.push_back(v);
  }
  for (const auto& k : keys) key_ptrs.push_back(k.c_str());
  check(crg_curve_create(name.c_str(), key_ptrs.data(), values.data(), values.size(), &out.ptr),
        "creating curve '" + name + "'");
}

// --metric grammar: const:VALUE | poly:c0,c1,... | tab:file.csv (rows u,g)
void make_metric(const std::string& spec, MetricHandle& out) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) die_config("metric spec '" + spec + "' needs kind:values");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (kind == "tab") {
    const auto rows = read_table(rest, 2);
    std::vector<double> us, gs;
    for (const auto& r : rows) {
      us.push_back(r[0]);
      gs.push_back(r[1]);
    }
    check(crg_metric_create_tabulated(us.data(), gs.data(), us.size(), &out.ptr),
          "creating tabulated metric");
    return;
  }
  const auto coeffs = parse_number_list(rest, "metric coefficients");
  check(crg_metric_create(kind.c_str(), coeffs.data(), coeffs.size(), &out.ptr),
        "creating metric '" + kind + "'");
}

void make_frames(const CurveHandle& curve, const std::string& method, int frame_nodes,
                 FramesHandle& out) {
  if (method != "rmf" && method != "frenet") die_config("--frame must be rmf or frenet");
  std::vector<double> nodes(static_cast<size_t>(frame_nodes) + 1);
  for (int i = 0; i <= frame_nodes; ++i) nodes[static_cast<size_t>(i)] = static_cast<double>(i) / frame_nodes;
  check(crg_frames_build(curve.ptr, method == "frenet" ? 1 : 0, nodes.data(), nodes.size(),
                         nullptr, &out.ptr),
        "building frame field");
}

class OutputWriter {
 public:
  OutputWriter(std::string command, std::string out_dir, json resolved_config)
      : command_(std::move(command)),
        dir_(std::move(out_dir)),
        config_(std::move(resolved_config)),
        start_(std::chrono::steady_clock::now()) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) die_config("cannot create output directory '" + dir_ + "'");
  }

  std::string path(const std::string& name) const { return dir_ + "/" + name; }

  void write_text(const std::string& name, const std::string& body) {
    std::ofstream out(path(name), std::ios::binary);
    if (!out) die_config("cannot write '" + path(name) + "'");
    out << body;
    files_.push_back(name);
  }

  void write_json(const std::string& name, const json& j) { write_text(name, j.dump() + "\n"); }

  // manifest last; wall_time_seconds is the one nondeterministic field
  void finish() {
    json manifest;
    manifest["schema"] = 1;
    manifest["command"] = command_;
    manifest["config"] = config_;
    manifest["tool_version"] = crg_version();
    if (config_.contains("seed")) manifest["master_seed"] = config_["seed"];
    manifest["outputs"] = files_;
    manifest["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_text(command_ + "_manifest.json", manifest.dump() + "\n");
  }

 private:
  std::string command_;
  std::string dir_;
  json config_;
  std::vector<std::string> files_;
  std::chrono::steady_clock::time_point start_;
};

// Fills option values from a --config JSON file for options the command line
// did not set; flags always win.
struct ConfigLayer {
  json data;

  template <typename T>
  void apply(const CLI::App& app, const std::string& flag, T& var) const {
    if (app.count("--" + flag) > 0) return;
    if (!data.contains(flag)) return;
    try {
      var = data.at(flag).get<T>();
    } catch (const std::exception&) {
      die_config("config field '" + flag + "' has the wrong type");
    }
  }
};

ConfigLayer load_config_layer(const std::string& path) {
  ConfigLayer layer;
  if (path.empty()) return layer;
  std::ifstream in(path);
  if (!in) die_config("cannot open config file '" + path + "'");
  try {
    in >> layer.data;
  } catch (const std::exception& e) {
    die_config("config file parse failure: " + std::string(e.what()));
  }
  if (!layer.data.is_object()) die_config("config file must hold a JSON object");
  return layer;
}

int default_workers() {
  if (const char* env = std::getenv("CORRUGATE_WORKERS")) {
    try {
      return std::max(0, std::stoi(env));
    } catch (const std::exception&) {
      die_config("CORRUGATE_WORKERS must be an integer");
    }
  }
  return 0;
}

json grid_json(const std::vector<double>& grid) {
  json j = json::array();
  for (double t : grid) j.push_back(t);
  return j;
}

json matrix_json(const std::vector<double>& values, int dim) {
  json rows = json::array();
  for (int i = 0; i < dim; ++i) {
    json row = json::array();
    for (int j = 0; j < dim; ++j) row.push_back(values[static_cast<size_t>(i) * dim + j]);
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------- commands

struct CommonGeometry {
  std::string curve_spec;
  std::string metric_spec;
  std::string frame_method = "rmf";
  int frame_nodes = 4096;
};

void add_geometry_options(CLI::App* cmd, CommonGeometry& geo) {
  cmd->add_option("--curve", geo.curve_spec, "curve spec, e.g. helix:a=0.1,b=0.05");
  cmd->add_option("--metric", geo.metric_spec, "metric spec, e.g. const:2");
  cmd->add_option("--frame", geo.frame_method, "frame method: rmf | frenet");
  cmd->add_option("--frame-nodes", geo.frame_nodes, "uniform frame-chain intervals");
}

void apply_geometry_config(const CLI::App& cmd, const ConfigLayer& cfg, CommonGeometry& geo) {
  cfg.apply(cmd, "curve", geo.curve_spec);
  cfg.apply(cmd, "metric", geo.metric_spec);
  cfg.apply(cmd, "frame", geo.frame_method);
  cfg.apply(cmd, "frame-nodes", geo.frame_nodes);
}

void require_geometry(const CommonGeometry& geo) {
  if (geo.curve_spec.empty()) die_config("--curve is required");
  if (geo.metric_spec.empty()) die_config("--metric is required");
  if (geo.frame_nodes < 1) die_config("--frame-nodes must be positive");
}

json geometry_config_json(const CommonGeometry& geo) {
  return json{{"curve", geo.curve_spec},
              {"metric", geo.metric_spec},
              {"frame", geo.frame_method},
              {"frame-nodes", geo.frame_nodes}};
}

int run_catalog() {
  std::printf("curves:\n");
  std::printf("  line:dx=..,dy=..,dz=..[,ox=..,oy=..,oz=..]   straight line, f0(u) = o + u d\n");
  std::printf("  circle:radius=R                              planar circle of one turn\n");
  std::printf("  helix:a=..,b=..                              (a cos 2piu, a sin 2piu, b u)\n");
  std::printf("  polynomial:x0=..,x1=..,y0=..,z0=..           per-component coefficients of u^k\n");
  std::printf("  tab:FILE.csv                                 cubic-spline through rows u,x,y,z\n");
  std::printf("metrics:\n");
  std::printf("  const:VALUE                                  g(u) = VALUE\n");
  std::printf("  poly:c0,c1,...                               g(u) = c0 + c1 u + ...\n");
  std::printf("  tab:FILE.csv                                 cubic-spline through rows u,g\n");
  std::printf("frames: rmf (default, double-reflection) | frenet\n");
  return 0;
}

int run_twist(const CommonGeometry& geo, int n, bool random, std::uint64_t seed, int quad,
              int rows, const std::string& out_dir) {
  require_geometry(geo);
  if (n < 1) die_config("--n must be positive");
  if (rows < 2) die_config("--rows must be at least 2");

  CurveHandle curve;
  MetricHandle metric;
  FramesHandle frames;
  PhaseHandle phase;
  MapHandle map;
  make_curve(geo.curve_spec, curve);
  make_metric(geo.metric_spec, metric);
  make_frames(curve, geo.frame_method, geo.frame_nodes, frames);
  if (random)
    check(crg_phase_random(n, seed, &phase.ptr), "building random phase");
  else
    check(crg_phase_deterministic(n, &phase.ptr), "building deterministic phase");
  check(crg_map_build(curve.ptr, metric.ptr, frames.ptr, phase.ptr, quad, &map.ptr),
        "building twisted map");

  json config = geometry_config_json(geo);
  config["n"] = n;
  config["random"] = random;
  config["seed"] = seed;
  config["quad"] = quad;
  config["rows"] = rows;
  OutputWriter out("twist", out_dir, config);

  std::string csv = "u,f0_x,f0_y,f0_z,fn_x,fn_y,fn_z,isometry_defect\n";
  for (int i = 0; i < rows; ++i) {
    const double u = static_cast<double>(i) / (rows - 1);
    double f0[3], fn[3], defect;
    check(crg_curve_derivative(curve.ptr, u, 0, f0), "evaluating base curve");
    check(crg_map_eval(map.ptr, u, fn), "evaluating twisted map");
    check(crg_map_isometry_defect_at(map.ptr, u, &defect), "evaluating isometry defect");
    csv += fmt(u);
    for (double v : {f0[0], f0[1], f0[2], fn[0], fn[1], fn[2], defect}) csv += "," + fmt(v);
    csv += "\n";
  }
  out.write_text("twist.csv", csv);
  out.finish();
  return 0;
}

int run_verify(const CommonGeometry& geo, int n, int grid, const std::string& out_dir) {
  require_geometry(geo);
  CurveHandle curve;
  MetricHandle metric;
  make_curve(geo.curve_spec, curve);
  make_metric(geo.metric_spec, metric);

  crg_shortness_report shortness{};
  check(crg_shortness(curve.ptr, metric.ptr, grid, &shortness), "shortness report");

  json config = geometry_config_json(geo);
  config["n"] = n;
  config["grid"] = grid;
  OutputWriter out("verify", out_dir, config);

  json report;
  report["shortness"] = {{"min_margin", shortness.min_margin},
                         {"argmin_u", shortness.argmin_u},
                         {"is_strictly_short", shortness.is_strictly_short != 0},
                         {"grid_size", shortness.grid_size}};

  bool ok = shortness.is_strictly_short != 0;
  if (ok) {
    FramesHandle frames;
    PhaseHandle phase;
    MapHandle map;
    make_frames(curve, geo.frame_method, geo.frame_nodes, frames);
    check(crg_phase_deterministic(n, &phase.ptr), "building phase");
    check(crg_map_build(curve.ptr, metric.ptr, frames.ptr, phase.ptr, 16, &map.ptr),
          "building twisted map");
    double defect = 0.0, sup = 0.0;
    check(crg_map_isometry_defect(map.ptr, grid, &defect), "isometry defect");
    check(crg_map_sup_difference(map.ptr, std::max(grid, n), &sup), "sup difference");
    report["isometry"] = {{"n", n}, {"max_relative_defect", defect}, {"tolerance", 1e-10},
                          {"pass", defect <= 1e-10}};
    report["sup_difference"] = sup;
    ok = defect <= 1e-10;
  }
  report["pass"] = ok;
  out.write_json("verify_report.json", report);
  out.finish();
  if (!ok) {
    std::fprintf(stderr, "corrugate: verify failed (%s)\n",
                 shortness.is_strictly_short ? "isometry defect above tolerance"
                                             : "curve is not strictly short");
    return 2;
  }
  return 0;
}

// sup grid: >= max(4096, 4n) nodes with spacing an exact divisor of the
// subinterval, so oscillation peaks are sampled
int sup_grid_for(int n) {
  const int per = std::max(4, (4096 + 4 * n - 1) / (4 * n) * 4);
  return per * n + 1;
}

int run_c0rate(const CommonGeometry& geo, const std::string& n_list, bool random,
               std::uint64_t seed, const std::string& out_dir) {
  require_geometry(geo);
  const auto ns_real = parse_number_list(n_list, "--n-list");
  std::vector<int> ns;
  for (double v : ns_real) {
    if (v < 1 || v != std::floor(v)) die_config("--n-list entries must be positive integers");
    ns.push_back(static_cast<int>(v));
  }

  CurveHandle curve;
  MetricHandle metric;
  FramesHandle frames;
  make_curve(geo.curve_spec, curve);
  make_metric(geo.metric_spec, metric);
  make_frames(curve, geo.frame_method, geo.frame_nodes, frames);

  std::vector<double> sups;
  for (int n : ns) {
    PhaseHandle phase;
    MapHandle map;
    if (random)
      check(crg_phase_random(n, seed, &phase.ptr), "building random phase");
    else
      check(crg_phase_deterministic(n, &phase.ptr), "building deterministic phase");
    check(crg_map_build(curve.ptr, metric.ptr, frames.ptr, phase.ptr, 16, &map.ptr),
          "building twisted map");
    double sup = 0.0;
    check(crg_map_sup_difference(map.ptr, sup_grid_for(n), &sup), "sup difference");
    sups.push_back(sup);
  }

  json config = geometry_config_json(geo);
  config["n-list"] = n_list;
  config["random"] = random;
  config["seed"] = seed;
  OutputWriter out("c0rate", out_dir, config);

  std::string csv = "n,sup_difference\n";
  for (size_t i = 0; i < ns.size(); ++i)
    csv += std::to_string(ns[i]) + "," + fmt(sups[i]) + "\n";
  out.write_text("c0rate.csv", csv);

  json fitj;
  bool degenerate = true;
  for (double s : sups) degenerate = degenerate && s <= 1e-12;
  if (degenerate) {
    fitj["degenerate_values"] = true;
    fitj["note"] = "all sup differences at or below 1e-12; rate fit refused";
  } else {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
    check(crg_rate_fit(ns.data(), sups.data(), ns.size(), &slope, &intercept, &r2), "rate fit");
    fitj["degenerate_values"] = false;
    fitj["slope"] = slope;
    fitj["intercept"] = intercept;
    fitj["r_squared"] = r2;
  }
  fitj["ns"] = ns;
  fitj["values"] = sups;
  out.write_json("c0rate_fit.json", fitj);
  out.finish();
  return 0;
}

int run_clt(const CommonGeometry& geo, int n, int samples, const std::string& t_grid_text,
            std::uint64_t seed, int workers, int quad, double k_sigma, double p_min,
            bool enumerate, const std::string& out_dir) {
  require_geometry(geo);
  const std::vector<double> t_grid = parse_t_grid(t_grid_text);
  const int g = static_cast<int>(t_grid.size());
  const int dim = 3 * g;

  CurveHandle curve;
  MetricHandle metric;
  FramesHandle frames;
  make_curve(geo.curve_spec, curve);
  make_metric(geo.metric_spec, metric);
  make_frames(curve, geo.frame_method, geo.frame_nodes, frames);

  json config = geometry_config_json(geo);
  config["n"] = n;
  config["samples"] = samples;
  config["t-grid"] = t_grid_text;
  config["seed"] = seed;
  config["workers"] = workers;
  config["quad"] = quad;
  config["k-sigma"] = k_sigma;
  config["p-min"] = p_min;
  config["enumerate"] = enumerate;

  if (enumerate) {
    OutputWriter out("clt", out_dir, config);
    EnumerationHandle enumeration;
    check(crg_enumeration_run(curve.ptr, metric.ptr, frames.ptr, n, quad, t_grid.data(),
                              t_grid.size(), &enumeration.ptr),
          "exact enumeration");
    std::uint64_t outcomes = 0;
    check(crg_enumeration_outcomes(enumeration.ptr, &outcomes), "enumeration size");

    std::vector<double> exact_mean(static_cast<size_t>(dim));
    std::vector<double> exact_cov(static_cast<size_t>(dim) * dim);
    check(crg_enumeration_moments(enumeration.ptr, exact_mean.data(), exact_cov.data()),
          "enumeration moments");

    // force the ensemble through every sign sequence and compare exactly
    crg_ensemble_config cfg{};
    cfg.n = n;
    cfg.samples = static_cast<int>(outcomes);
    cfg.master_seed = seed;
    cfg.quadrature_order = quad;
    cfg.workers = workers;
    cfg.sign_mode = 2;  // enumerate_all
    EnsembleHandle ens;
    check(crg_ensemble_run(curve.ptr, metric.ptr, frames.ptr, &cfg, t_grid.data(), t_grid.size(),
                           &ens.ptr),
          "forced full ensemble");
    std::vector<double> emp_mean(static_cast<size_t>(dim));
    std::vector<double> emp_cov(static_cast<size_t>(dim) * dim);
    check(crg_empirical_moments(crg_ensemble_data(ens.ptr), cfg.samples, dim, emp_mean.data(),
                                emp_cov.data(), nullptr),
          "ensemble moments");
    const double pop = static_cast<double>(cfg.samples - 1) / cfg.samples;
    double mean_dev = 0.0, cov_dev = 0.0;
    for (int i = 0; i < dim; ++i)
      mean_dev = std::max(mean_dev, std::abs(emp_mean[static_cast<size_t>(i)] -
                                             exact_mean[static_cast<size_t>(i)]));
    for (size_t i = 0; i < exact_cov.size(); ++i)
      cov_dev = std::max(cov_dev, std::abs(emp_cov[i] * pop - exact_cov[i]));

    std::string csv = "outcome,t,D_x,D_y,D_z\n";
    std::vector<double> row(static_cast<size_t>(dim));
    for (std::uint64_t j = 0; j < outcomes; ++j) {
      check(crg_enumeration_outcome(enumeration.ptr, j, row.data()), "enumeration outcome");
      for (int ti = 0; ti < g; ++ti) {
        csv += std::to_string(j) + "," + fmt(t_grid[static_cast<size_t>(ti)]);
        for (int c = 0; c < 3; ++c) csv += "," + fmt(row[static_cast<size_t>(3 * ti + c)]);
        csv += "\n";
      }
    }
    out.write_text("clt_exact_law.csv", csv);

    json rep;
    rep["n"] = n;
    rep["outcomes"] = outcomes;
    rep["t_grid"] = grid_json(t_grid);
    rep["exact_mean"] = exact_mean;
    rep["exact_covariance"] = matrix_json(exact_cov, dim);
    rep["max_mean_deviation_vs_forced_ensemble"] = mean_dev;
    rep["max_covariance_deviation_vs_forced_ensemble"] = cov_dev;
    rep["tolerance"] = 1e-12;
    rep["consistent"] = mean_dev <= 1e-12 && cov_dev <= 1e-12;
    out.write_json("clt_enumeration.json", rep);
    out.finish();
    if (!(mean_dev <= 1e-12 && cov_dev <= 1e-12)) {
      std::fprintf(stderr, "corrugate: enumeration and forced ensemble disagree\n");
      return 5;
    }
    return 0;
  }

  crg_ensemble_config cfg{};
  cfg.n = n;
  cfg.samples = samples;
  cfg.master_seed = seed;
  cfg.quadrature_order = quad;
  cfg.workers = workers;
  cfg.sign_mode = 0;
  EnsembleHandle ens;
  check(crg_ensemble_run(curve.ptr, metric.ptr, frames.ptr, &cfg, t_grid.data(), t_grid.size(),
                         &ens.ptr),
        "running ensemble");

  std::vector<double> mean(static_cast<size_t>(dim));
  std::vector<double> cov(static_cast<size_t>(dim) * dim);
  std::vector<double> se(static_cast<size_t>(dim) * dim);
  check(crg_empirical_moments(crg_ensemble_data(ens.ptr), samples, dim, mean.data(), cov.data(),
                              se.data()),
        "ensemble moments");

  BundleHandle bundle;
  check(crg_bundle_create(curve.ptr, metric.ptr, frames.ptr, 0.0, &bundle.ptr),
        "building limit bundle");
  std::vector<double> oracle(static_cast<size_t>(dim) * dim);
  check(crg_limit_covariance_matrix(bundle.ptr, t_grid.data(), t_grid.size(), oracle.data()),
        "oracle covariance");

  std::vector<int> pass(static_cast<size_t>(dim) * dim, 0);
  double worst = 0.0;
  int all_pass = 0;
  check(crg_covariance_comparison(cov.data(), oracle.data(), se.data(), dim, k_sigma, pass.data(),
                                  &worst, &all_pass),
        "covariance comparison");

  // KS of the sin channel projected on Z(t) against the oracle marginal.
  // Reported at every grid time; the exit gate applies at the final time
  // only.  At breakpoint-aligned early times the prelimit projection is a
  // near-binomial lattice whose sup-CDF distance to the Gaussian decays
  // like (n t)^{-1/2}, which the KS statistic correctly resolves at large
  // sample counts.
  std::vector<double> cos_channel(static_cast<size_t>(dim));
  check(crg_ensemble_cos_channel(ens.ptr, cos_channel.data()), "ensemble cos channel");
  const double* data = crg_ensemble_data(ens.ptr);
  json gof = json::array();
  bool gof_pass = true;
  for (int ti = 0; ti < g; ++ti) {
    double frame9[9];
    check(crg_frames_eval(frames.ptr, t_grid[static_cast<size_t>(ti)], frame9), "frame at t");
    const double* z = frame9 + 6;
    double sigma2 = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        sigma2 += z[a] * oracle[static_cast<size_t>(3 * ti + a) * dim + (3 * ti + b)] * z[b];
    std::vector<double> proj(static_cast<size_t>(samples));
    for (int s = 0; s < samples; ++s) {
      double acc = 0.0;
      for (int c = 0; c < 3; ++c)
        acc += z[c] * (data[(static_cast<size_t>(s) * g + ti) * 3 + c] -
                       cos_channel[static_cast<size_t>(3 * ti + c)]);
      proj[static_cast<size_t>(s)] = acc;
    }
    double stat = 0.0, p = 0.0;
    int degenerate = 0;
    check(crg_ks_gof(proj.data(), proj.size(), std::sqrt(sigma2), &stat, &p, &degenerate),
          "KS test");
    const bool gated = ti == g - 1;
    const bool ok = p >= p_min;
    if (gated) gof_pass = ok;
    gof.push_back(json{{"t", t_grid[static_cast<size_t>(ti)]},
                       {"statistic", stat},
                       {"p_value", p},
                       {"sample_size", samples},
                       {"null_sigma", std::sqrt(sigma2)},
                       {"degenerate", degenerate != 0},
                       {"gated", gated},
                       {"pass", ok}});
  }

  OutputWriter out("clt", out_dir, config);
  {
    std::string csv = "sample,t,D_x,D_y,D_z\n";
    for (int s = 0; s < samples; ++s)
      for (int ti = 0; ti < g; ++ti) {
        csv += std::to_string(s) + "," + fmt(t_grid[static_cast<size_t>(ti)]);
        for (int c = 0; c < 3; ++c)
          csv += "," + fmt(data[(static_cast<size_t>(s) * g + ti) * 3 + c]);
        csv += "\n";
      }
    out.write_text("clt_ensemble.csv", csv);
  }
  {
    json rep;
    rep["t_grid"] = grid_json(t_grid);
    rep["k_sigma"] = k_sigma;
    rep["oracle"] = matrix_json(oracle, dim);
    rep["empirical"] = matrix_json(cov, dim);
    rep["standard_errors"] = matrix_json(se, dim);
    json pj = json::array();
    for (int i = 0; i < dim; ++i) {
      json rowj = json::array();
      for (int j = 0; j < dim; ++j) rowj.push_back(pass[static_cast<size_t>(i) * dim + j] != 0);
      pj.push_back(std::move(rowj));
    }
    rep["pass_matrix"] = pj;
    rep["worst_standardized_deviation"] = worst;
    rep["all_pass"] = all_pass != 0;
    rep["empirical_mean"] = mean;
    out.write_json("clt_covariance.json", rep);
  }
  out.write_json("clt_gof.json", gof);
  out.finish();

  if (all_pass == 0 || !gof_pass) {
    std::fprintf(stderr, "corrugate: statistical gate failed (covariance %s, gof %s)\n",
                 all_pass ? "pass" : "fail", gof_pass ? "pass" : "fail");
    return 4;
  }
  return 0;
}

int run_limit_sample(const CommonGeometry& geo, const std::string& t_grid_text, int samples,
                     std::uint64_t seed, const std::string& out_dir) {
  require_geometry(geo);
  const std::vector<double> t_grid = parse_t_grid(t_grid_text);
  const int g = static_cast<int>(t_grid.size());
  const int dim = 3 * g;
  if (samples < 1) die_config("--samples must be positive");

  CurveHandle curve;
  MetricHandle metric;
  FramesHandle frames;
  BundleHandle bundle;
  make_curve(geo.curve_spec, curve);
  make_metric(geo.metric_spec, metric);
  make_frames(curve, geo.frame_method, geo.frame_nodes, frames);
  check(crg_bundle_create(curve.ptr, metric.ptr, frames.ptr, 0.0, &bundle.ptr),
        "building limit bundle");

  std::vector<double> oracle(static_cast<size_t>(dim) * dim);
  check(crg_limit_covariance_matrix(bundle.ptr, t_grid.data(), t_grid.size(), oracle.data()),
        "oracle covariance");
  std::vector<double> draws(static_cast<size_t>(samples) * dim);
  check(crg_limit_sample(bundle.ptr, t_grid.data(), t_grid.size(), samples, seed, draws.data()),
        "sampling the limit law");

  json config = geometry_config_json(geo);
  config["t-grid"] = t_grid_text;
  config["samples"] = samples;
  config["seed"] = seed;
  config["oracle_covariance"] = matrix_json(oracle, dim);
  OutputWriter out("limit_sample", out_dir, config);

  std::string csv = "sample,t,L_x,L_y,L_z\n";
  for (int s = 0; s < samples; ++s)
    for (int ti = 0; ti < g; ++ti) {
      csv += std::to_string(s) + "," + fmt(t_grid[static_cast<size_t>(ti)]);
      for (int c = 0; c < 3; ++c)
        csv += "," + fmt(draws[static_cast<size_t>(s) * dim + 3 * ti + c]);
      csv += "\n";
    }
  out.write_text("limit_sample.csv", csv);
  out.finish();
  return 0;
}

int run_enumerate(const CommonGeometry& geo, int n, const std::string& t_grid_text, int quad,
                  const std::string& out_dir) {
  require_geometry(geo);
  const std::vector<double> t_grid = parse_t_grid(t_grid_text);
  const int g = static_cast<int>(t_grid.size());
  const int dim = 3 * g;

  CurveHandle curve;
  MetricHandle metric;
  FramesHandle frames;
  EnumerationHandle enumeration;
  make_curve(geo.curve_spec, curve);
  make_metric(geo.metric_spec, metric);
  make_frames(curve, geo.frame_method, geo.frame_nodes, frames);
  check(crg_enumeration_run(curve.ptr, metric.ptr, frames.ptr, n, quad, t_grid.data(),
                            t_grid.size(), &enumeration.ptr),
        "exact enumeration");

  std::uint64_t outcomes = 0;
  check(crg_enumeration_outcomes(enumeration.ptr, &outcomes), "enumeration size");
  std::vector<double> mean(static_cast<size_t>(dim));
  std::vector<double> cov(static_cast<size_t>(dim) * dim);
  check(crg_enumeration_moments(enumeration.ptr, mean.data(), cov.data()), "enumeration moments");

  json config = geometry_config_json(geo);
  config["n"] = n;
  config["t-grid"] = t_grid_text;
  config["quad"] = quad;
  OutputWriter out("enumerate", out_dir, config);

  std::string csv = "outcome,t,D_x,D_y,D_z\n";
  std::vector<double> row(static_cast<size_t>(dim));
  for (std::uint64_t j = 0; j < outcomes; ++j) {
    check(crg_enumeration_outcome(enumeration.ptr, j, row.data()), "enumeration outcome");
    for (int ti = 0; ti < g; ++ti) {
      csv += std::to_string(j) + "," + fmt(t_grid[static_cast<size_t>(ti)]);
      for (int c = 0; c < 3; ++c) csv += "," + fmt(row[static_cast<size_t>(3 * ti + c)]);
      csv += "\n";
    }
  }
  out.write_text("enumerate_law.csv", csv);

  json rep;
  rep["n"] = n;
  rep["outcomes"] = outcomes;
  rep["t_grid"] = grid_json(t_grid);
  rep["mean"] = mean;
  rep["covariance"] = matrix_json(cov, dim);
  out.write_json("enumerate_moments.json", rep);
  out.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corrugate: isometric C1 curves via Nash twists and their Gaussian limit law"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; explicit flags override it")
      ->configurable(false);

  // catalog
  auto* cmd_catalog = app.add_subcommand("catalog", "list curve/metric specs");
  cmd_catalog->fallthrough();

  // twist
  CommonGeometry twist_geo;
  int twist_n = 64, twist_quad = 16, twist_rows = 4096;
  bool twist_random = false;
  std::uint64_t twist_seed = 0;
  std::string twist_out = ".";
  auto* cmd_twist = app.add_subcommand("twist", "build one twisted map and sample it");
  cmd_twist->fallthrough();
  add_geometry_options(cmd_twist, twist_geo);
  cmd_twist->add_option("--n", twist_n, "twist frequency");
  cmd_twist->add_flag("--random", twist_random, "random phase (simple random walk)");
  cmd_twist->add_option("--seed", twist_seed, "sign-sequence seed");
  cmd_twist->add_option("--quad", twist_quad, "per-subinterval Gauss-Legendre order");
  cmd_twist->add_option("--rows", twist_rows, "CSV rows (uniform in u)");
  cmd_twist->add_option("--out-dir", twist_out, "output directory");

  // verify
  CommonGeometry verify_geo;
  int verify_n = 64, verify_grid = 4096;
  std::string verify_out = ".";
  auto* cmd_verify = app.add_subcommand("verify", "shortness and isometry report");
  cmd_verify->fallthrough();
  add_geometry_options(cmd_verify, verify_geo);
  cmd_verify->add_option("--n", verify_n, "twist frequency for the isometry check");
  cmd_verify->add_option("--grid", verify_grid, "evaluation grid");
  cmd_verify->add_option("--out-dir", verify_out, "output directory");

  // c0rate
  CommonGeometry c0_geo;
  std::string c0_nlist = "8,16,32,64,128,256,512,1024";
  bool c0_random = false;
  std::uint64_t c0_seed = 0;
  std::string c0_out = ".";
  auto* cmd_c0 = app.add_subcommand("c0rate", "sup|f_n - f0| decay rate fit");
  cmd_c0->fallthrough();
  add_geometry_options(cmd_c0, c0_geo);
  cmd_c0->add_option("--n-list", c0_nlist, "comma-separated frequencies (>= 4)");
  cmd_c0->add_flag("--random", c0_random, "random phases");
  cmd_c0->add_option("--seed", c0_seed, "sign-sequence seed");
  cmd_c0->add_option("--out-dir", c0_out, "output directory");

  // clt
  CommonGeometry clt_geo;
  int clt_n = 1024, clt_samples = 2000, clt_quad = 16, clt_workers = default_workers();
  std::string clt_grid = "0.25,0.5,0.75,1";
  std::uint64_t clt_seed = 42;
  double clt_ksigma = 4.0, clt_pmin = 0.01;
  bool clt_enum = false;
  std::string clt_out = ".";
  auto* cmd_clt = app.add_subcommand("clt", "ensemble vs limit-law verification");
  cmd_clt->fallthrough();
  add_geometry_options(cmd_clt, clt_geo);
  cmd_clt->add_option("--n", clt_n, "twist frequency");
  cmd_clt->add_option("--samples", clt_samples, "Monte Carlo samples");
  cmd_clt->add_option("--t-grid", clt_grid, "comma-separated grid times in (0,1]");
  cmd_clt->add_option("--seed", clt_seed, "master seed");
  cmd_clt->add_option("--workers", clt_workers, "worker threads (0 = auto)");
  cmd_clt->add_option("--quad", clt_quad, "per-subinterval Gauss-Legendre order");
  cmd_clt->add_option("--k-sigma", clt_ksigma, "covariance gate width");
  cmd_clt->add_option("--p-min", clt_pmin, "KS p-value gate");
  cmd_clt->add_flag("--enumerate", clt_enum, "exact 2^n enumeration cross-check (n <= 20)");
  cmd_clt->add_option("--out-dir", clt_out, "output directory");

  // limit-sample
  CommonGeometry ls_geo;
  std::string ls_grid = "0.25,0.5,0.75,1";
  int ls_samples = 1000;
  std::uint64_t ls_seed = 42;
  std::string ls_out = ".";
  auto* cmd_ls = app.add_subcommand("limit-sample", "draw exact samples of the limit law");
  cmd_ls->fallthrough();
  add_geometry_options(cmd_ls, ls_geo);
  cmd_ls->add_option("--t-grid", ls_grid, "comma-separated grid times in (0,1]");
  cmd_ls->add_option("--samples", ls_samples, "number of draws");
  cmd_ls->add_option("--seed", ls_seed, "sampling seed");
  cmd_ls->add_option("--out-dir", ls_out, "output directory");

  // enumerate
  CommonGeometry en_geo;
  int en_n = 12, en_quad = 16;
  std::string en_grid = "0.25,0.5,0.75,1";
  std::string en_out = ".";
  auto* cmd_en = app.add_subcommand("enumerate", "exact law over all 2^n sign sequences");
  cmd_en->fallthrough();
  add_geometry_options(cmd_en, en_geo);
  cmd_en->add_option("--n", en_n, "twist frequency (<= 20)");
  cmd_en->add_option("--t-grid", en_grid, "comma-separated grid times in (0,1]");
  cmd_en->add_option("--quad", en_quad, "per-subinterval Gauss-Legendre order");
  cmd_en->add_option("--out-dir", en_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 3;
  }

  const ConfigLayer cfg = load_config_layer(config_path);

  if (cmd_catalog->parsed()) return run_catalog();

  if (cmd_twist->parsed()) {
    apply_geometry_config(*cmd_twist, cfg, twist_geo);
    cfg.apply(*cmd_twist, "n", twist_n);
    cfg.apply(*cmd_twist, "random", twist_random);
    cfg.apply(*cmd_twist, "seed", twist_seed);
    cfg.apply(*cmd_twist, "quad", twist_quad);
    cfg.apply(*cmd_twist, "rows", twist_rows);
    cfg.apply(*cmd_twist, "out-dir", twist_out);
    return run_twist(twist_geo, twist_n, twist_random, twist_seed, twist_quad, twist_rows,
                     twist_out);
  }
  if (cmd_verify->parsed()) {
    apply_geometry_config(*cmd_verify, cfg, verify_geo);
    cfg.apply(*cmd_verify, "n", verify_n);
    cfg.apply(*cmd_verify, "grid", verify_grid);
    cfg.apply(*cmd_verify, "out-dir", verify_out);
    return run_verify(verify_geo, verify_n, verify_grid, verify_out);
  }
  if (cmd_c0->parsed()) {
    apply_geometry_config(*cmd_c0, cfg, c0_geo);
    cfg.apply(*cmd_c0, "n-list", c0_nlist);
    cfg.apply(*cmd_c0, "random", c0_random);
    cfg.apply(*cmd_c0, "seed", c0_seed);
    cfg.apply(*cmd_c0, "out-dir", c0_out);
    return run_c0rate(c0_geo, c0_nlist, c0_random, c0_seed, c0_out);
  }
  if (cmd_clt->parsed()) {
    apply_geometry_config(*cmd_clt, cfg, clt_geo);
    cfg.apply(*cmd_clt, "n", clt_n);
    cfg.apply(*cmd_clt, "samples", clt_samples);
    cfg.apply(*cmd_clt, "t-grid", clt_grid);
    cfg.apply(*cmd_clt, "seed", clt_seed);
    cfg.apply(*cmd_clt, "workers", clt_workers);
    cfg.apply(*cmd_clt, "quad", clt_quad);
    cfg.apply(*cmd_clt, "k-sigma", clt_ksigma);
    cfg.apply(*cmd_clt, "p-min", clt_pmin);
    cfg.apply(*cmd_clt, "enumerate", clt_enum);
    cfg.apply(*cmd_clt, "out-dir", clt_out);
    return run_clt(clt_geo, clt_n, clt_samples, clt_grid, clt_seed, clt_workers, clt_quad,
                   clt_ksigma, clt_pmin, clt_enum, clt_out);
  }
  if (cmd_ls->parsed()) {
    apply_geometry_config(*cmd_ls, cfg, ls_geo);
    cfg.apply(*cmd_ls, "t-grid", ls_grid);
    cfg.apply(*cmd_ls, "samples", ls_samples);
    cfg.apply(*cmd_ls, "seed", ls_seed);
    cfg.apply(*cmd_ls, "out-dir", ls_out);
    return run_limit_sample(ls_geo, ls_grid, ls_samples, ls_seed, ls_out);
  }
  if (cmd_en->parsed()) {
    apply_geometry_config(*cmd_en, cfg, en_geo);
    cfg.apply(*cmd_en, "n", en_n);
    cfg.apply(*cmd_en, "t-grid", en_grid);
    cfg.apply(*cmd_en, "quad", en_quad);
    cfg.apply(*cmd_en, "out-dir", en_out);
    return run_enumerate(en_geo, en_n, en_grid, en_quad, en_out);
  }
  return 3;
}
