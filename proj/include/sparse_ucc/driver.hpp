/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

/// \file driver.hpp
/// Run configuration and the command pipelines behind the command-line
/// tool. Every command writes its artifacts plus manifest.json into the
/// output directory and returns a process exit code.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sparse_ucc/sparse_ucc.hpp"

#ifndef SPARSE_UCC_VERSION
#define SPARSE_UCC_VERSION "0.0.0"
#endif

namespace sparse_ucc {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_config = 2, exit_convergence = 3, exit_io = 4 };

struct RunConfig {
  std::string fcidump_path;
  /// "mp2", "ccsd" or "file"; amplitude_file is required for "file".
  std::string amplitude_source = "ccsd";
  std::string amplitude_file;
  bool include_singles = true;
  std::optional<std::size_t> max_doubles;
  std::string ordering = "magnitude"; // magnitude | random | as_given
  std::uint64_t seed = 0;
  /// Exactly one of n_wf / nwf_grid is meaningful for a given command.
  std::optional<std::size_t> n_wf;
  std::vector<std::size_t> nwf_grid;
  bool point_group = false;        // drop non-totally-symmetric operators
  bool symmetry_reduction = false; // spin-complement parameter classes
  bool optimize = false;
  double opt_tol = 1e-3;
  int opt_max_iter = 200;
  std::string fit_window = "largest"; // largest | all | above
  std::size_t fit_count = 20;
  std::size_t fit_nwf_min = 0;
  std::string sweep_csv; // extrapolate input; defaults to <out>/sweep.csv
  std::size_t n_orderings = 20;
  std::optional<double> reference_energy;
  int threads = 0; // 0: runtime default
  std::string output_dir = "out";

  void validate() const {
    if (amplitude_source != "mp2" && amplitude_source != "ccsd" && amplitude_source != "file")
      throw ConfigError("amplitude_source must be mp2, ccsd or file, not '" + amplitude_source + "'");
    if (amplitude_source == "file" && amplitude_file.empty())
      throw ConfigError("amplitude_source 'file' needs amplitude_file");
    if (amplitude_source != "file" && !amplitude_file.empty())
      throw ConfigError("amplitude_file given but amplitude_source is '" + amplitude_source +
                        "': exactly one amplitude source is allowed");
    if (ordering != "magnitude" && ordering != "random" && ordering != "as_given")
      throw ConfigError("ordering must be magnitude, random or as_given");
    if (n_wf && *n_wf == 0) throw ConfigError("n_wf must be at least 1");
    if (n_wf && !nwf_grid.empty()) throw ConfigError("give either n_wf or nwf_grid, not both");
    if (optimize && !nwf_grid.empty())
      throw ConfigError("sweep and optimize are mutually exclusive in one invocation");
    if (fit_window != "largest" && fit_window != "all" && fit_window != "above")
      throw ConfigError("fit.window must be largest, all or above");
    if (!(opt_tol > 0.0) || opt_max_iter < 0) throw ConfigError("bad optimize tolerance/max_iter");
    if (threads < 0) throw ConfigError("threads must be non-negative");
  }

  Ordering ordering_policy() const {
    if (ordering == "random") return Ordering::random(seed);
    if (ordering == "as_given") return Ordering::as_given();
    return Ordering::magnitude();
  }

  FitWindow window() const {
    if (fit_window == "all") return FitWindow::all();
    if (fit_window == "above") return FitWindow::smallest_above(fit_nwf_min, fit_count);
    return FitWindow::largest(fit_count);
  }
};

/// Keys mirror the RunConfig fields; "n_wf" may be a count or a list (sweep
/// grid), "nwf_grid" may be {"min","max","count"}. Unknown keys are errors.
inline RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& k = it.key();
      const auto& v = it.value();
      if (k == "fcidump") c.fcidump_path = v.get<std::string>();
      else if (k == "amplitude_source") c.amplitude_source = v.get<std::string>();
      else if (k == "amplitude_file") c.amplitude_file = v.get<std::string>();
      else if (k == "include_singles") c.include_singles = v.get<bool>();
      else if (k == "max_doubles") {
        if (!v.is_null()) c.max_doubles = v.get<std::size_t>();
      } else if (k == "ordering") c.ordering = v.get<std::string>();
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "n_wf") {
        if (v.is_array()) c.nwf_grid = v.get<std::vector<std::size_t>>();
        else if (!v.is_null()) c.n_wf = v.get<std::size_t>();
      } else if (k == "nwf_grid") {
        if (v.is_array()) c.nwf_grid = v.get<std::vector<std::size_t>>();
        else c.nwf_grid = log_grid(v.at("min").get<std::size_t>(), v.at("max").get<std::size_t>(),
                                   v.at("count").get<int>());
      } else if (k == "point_group") c.point_group = v.get<bool>();
      else if (k == "symmetry_reduction") c.symmetry_reduction = v.get<bool>();
      else if (k == "optimize") {
        if (v.is_boolean()) c.optimize = v.get<bool>();
        else {
          c.optimize = true;
          c.opt_tol = v.value("tol", c.opt_tol);
          c.opt_max_iter = v.value("max_iter", c.opt_max_iter);
        }
      } else if (k == "fit") {
        c.fit_window = v.value("window", c.fit_window);
        c.fit_count = v.value("count", c.fit_count);
        c.fit_nwf_min = v.value("n_wf_min", c.fit_nwf_min);
      } else if (k == "sweep_csv") c.sweep_csv = v.get<std::string>();
      else if (k == "n_orderings") c.n_orderings = v.get<std::size_t>();
      else if (k == "reference_energy") {
        if (!v.is_null()) c.reference_energy = v.get<double>();
      } else if (k == "threads") c.threads = v.get<int>();
      else if (k == "output_dir") c.output_dir = v.get<std::string>();
      else throw ConfigError("unknown config key '" + k + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["fcidump"] = c.fcidump_path;
  j["amplitude_source"] = c.amplitude_source;
  j["amplitude_file"] = c.amplitude_file;
  j["include_singles"] = c.include_singles;
  j["max_doubles"] = c.max_doubles ? nlohmann::json(*c.max_doubles) : nlohmann::json(nullptr);
  j["ordering"] = c.ordering;
  j["seed"] = c.seed;
  if (c.n_wf) j["n_wf"] = *c.n_wf;
  if (!c.nwf_grid.empty()) j["nwf_grid"] = c.nwf_grid;
  j["point_group"] = c.point_group;
  j["symmetry_reduction"] = c.symmetry_reduction;
  j["optimize"] = c.optimize ? nlohmann::json{{"tol", c.opt_tol}, {"max_iter", c.opt_max_iter}}
                             : nlohmann::json(false);
  j["fit"] = {{"window", c.fit_window}, {"count", c.fit_count}, {"n_wf_min", c.fit_nwf_min}};
  if (!c.sweep_csv.empty()) j["sweep_csv"] = c.sweep_csv;
  j["n_orderings"] = c.n_orderings;
  j["reference_energy"] = c.reference_energy ? nlohmann::json(*c.reference_energy)
                                             : nlohmann::json(nullptr);
  j["output_dir"] = c.output_dir;
  return j; // threads deliberately excluded: results do not depend on it
}

inline RunConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace detail {

inline std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

inline std::filesystem::path out_path(const RunConfig& c, const std::string& name) {
  return std::filesystem::path(c.output_dir) / name;
}

inline std::ofstream open_out(const RunConfig& c, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(c.output_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + c.output_dir + "': " + ec.message());
  std::ofstream f(out_path(c, name));
  if (!f) throw IoError("cannot write '" + out_path(c, name).string() + "'");
  return f;
}

inline void write_json(const RunConfig& c, const std::string& name, const nlohmann::json& j) {
  auto f = open_out(c, name);
  f << std::setw(2) << j << '\n';
  if (!f) throw IoError("write failed for '" + name + "'");
}

inline void write_manifest(const RunConfig& c, const std::string& command,
                           const std::vector<std::uint64_t>& seeds) {
  const auto cfg = config_to_json(c);
  nlohmann::json m;
  m["command"] = command;
  m["config"] = cfg;
  m["config_hash"] = hex64(fnv1a(cfg.dump()));
  m["seeds"] = seeds;
  m["version"] = SPARSE_UCC_VERSION;
  m["modules"] = {{"integrals", SPARSE_UCC_VERSION}, {"circuit", SPARSE_UCC_VERSION},
                  {"amplitudes", SPARSE_UCC_VERSION}, {"analysis", SPARSE_UCC_VERSION},
                  {"optimizer", SPARSE_UCC_VERSION}};
  write_json(c, "manifest.json", m);
}

/// Integrals, pool and parameters shared by the circuit commands.
struct Problem {
  SpatialIntegrals ints;
  double e_hf = 0.0;
  std::vector<ExcitationOp> pool;
  std::vector<double> theta;
  InitialSource source = InitialSource::custom;
};

inline Problem load_problem(const RunConfig& c) {
  if (c.fcidump_path.empty()) throw ConfigError("no FCIDUMP given (--fcidump or \"fcidump\")");
  Problem p;
  p.ints = read_fcidump(c.fcidump_path);
  p.e_hf = hf_energy(p.ints);
  AmplitudeSet amps;
  if (c.amplitude_source == "mp2") {
    amps = mp2_amplitudes(p.ints).amplitudes;
    p.source = InitialSource::mp2;
  } else if (c.amplitude_source == "ccsd") {
    amps = ccsd_solve(p.ints).amplitudes;
    p.source = InitialSource::ccsd;
  } else {
    amps = read_amplitudes(c.amplitude_file);
  }
  PoolOptions po;
  po.n_occ = p.ints.n_occ();
  po.n_orb = p.ints.n_orb();
  po.include_singles = c.include_singles;
  po.max_doubles = c.max_doubles;
  if (c.point_group) {
    if (p.ints.orb_sym().empty()) throw ConfigError("point_group requested but FCIDUMP has no ORBSYM");
    po.orb_sym = std::vector<int>(p.ints.orb_sym().begin(), p.ints.orb_sym().end());
  }
  p.pool = build_pool(po, &amps);
  p.theta = amplitudes_to_parameters(amps, p.pool);
  return p;
}

inline CircuitTemplate make_template(const Problem& p, const RunConfig& c) {
  return {&p.ints, reference_determinant(p.ints),
          order_factors(make_factors(p.pool, p.theta), c.ordering_policy())};
}

inline std::vector<std::uint64_t> seeds_of(const RunConfig& c) {
  return c.ordering == "random" ? std::vector<std::uint64_t>{c.seed} : std::vector<std::uint64_t>{};
}

inline void cmd_energy(const RunConfig& c) {
  if (!c.nwf_grid.empty()) throw ConfigError("energy needs a single n_wf, not a grid");
  auto p = load_problem(c);
  CircuitSpec spec;
  spec.factors = make_template(p, c).factors;
  spec.n_wf = c.n_wf.value_or(unlimited_nwf);
  spec.include_singles = c.include_singles;
  auto r = run_circuit(reference_determinant(p.ints), spec, p.ints);
  write_json(c, "energy.json",
             {{"e_total", r.energy}, {"e_corr", r.energy - p.e_hf}, {"e_hf", p.e_hf},
              {"peak_support", r.peak_support}, {"factor_count", spec.factors.size()},
              {"n_wf", c.n_wf ? nlohmann::json(*c.n_wf) : nlohmann::json(nullptr)},
              {"truncated", r.truncated}});
  write_json(c, "circuit.json", circuit_to_json(spec.factors, p.ints.n_orb()));
  write_manifest(c, "energy", seeds_of(c));
}

inline void cmd_sweep(const RunConfig& c) {
  if (c.optimize) throw ConfigError("sweep and optimize are mutually exclusive in one invocation");
  auto p = load_problem(c);
  const auto grid = c.nwf_grid.empty() ? default_nwf_grid() : c.nwf_grid;
  auto s = nwf_sweep(make_template(p, c), grid);
  auto f = open_out(c, "sweep.csv");
  write_sweep_csv(f, s);
  write_manifest(c, "sweep", seeds_of(c));
}

inline void cmd_extrapolate(const RunConfig& c) {
  const std::string src = c.sweep_csv.empty() ? out_path(c, "sweep.csv").string() : c.sweep_csv;
  std::ifstream in(src);
  if (!in) throw IoError("cannot open sweep CSV '" + src + "'");
  auto s = read_sweep_csv(in);
  const auto w = c.window();
  auto fit = extrapolate(s, w);
  auto f = open_out(c, "fit.csv");
  write_fit_csv(f, fit, w);
  nlohmann::json j{{"a", fit.a}, {"b", fit.b}, {"c", fit.c}, {"window", w.describe()},
                   {"n_points", fit.window.size()}, {"max_residual", fit.max_residual},
                   {"sigma_c_estimator", "ordinary least-squares intercept standard error"}};
  j["sigma_c"] = std::isfinite(fit.sigma_c) ? nlohmann::json(fit.sigma_c) : nlohmann::json(nullptr);
  write_json(c, "fit.json", j);
  write_manifest(c, "extrapolate", {});
}

inline void cmd_orderings(const RunConfig& c) {
  auto p = load_problem(c);
  CircuitTemplate tpl{&p.ints, reference_determinant(p.ints), make_factors(p.pool, p.theta)};
  auto st = ordering_study(tpl, c.n_orderings, c.seed, c.n_wf.value_or(10000));
  auto f = open_out(c, "orderings.csv");
  write_ordering_csv(f, st);
  write_json(c, "orderings.json",
             {{"mean", st.mean}, {"stddev", st.stddev}, {"min", st.min}, {"max", st.max},
              {"magnitude_e_corr", st.magnitude_e_corr}, {"magnitude_offset", st.magnitude_offset}});
  write_manifest(c, "orderings", st.seeds);
}

inline void cmd_optimize(const RunConfig& c) {
  if (!c.nwf_grid.empty()) throw ConfigError("sweep and optimize are mutually exclusive in one invocation");
  auto p = load_problem(c);
  auto classes = c.symmetry_reduction ? spin_complement_classes(p.pool) : identity_classes(p.pool.size());
  CircuitObjective obj(p.ints, p.pool, classes, p.theta, c.ordering_policy(),
                       c.n_wf.value_or(100000));
  MinimizeOptions mo;
  mo.gtol = c.opt_tol;
  mo.max_iter = c.opt_max_iter;
  auto r = minimize([&](std::span<const double> x) { return obj(x); }, obj.reduce(p.theta), mo, p.source);
  auto f = open_out(c, "trace.csv");
  write_trace_csv(f, r.trace, p.e_hf);
  nlohmann::json j{{"e_total", r.f}, {"e_corr", r.f - p.e_hf}, {"e_hf", p.e_hf},
                   {"iterations", r.iterations}, {"converged", r.converged},
                   {"line_search_failed", r.line_search_failed}, {"message", r.message},
                   {"n_parameters", obj.dimension()}, {"pool_size", p.pool.size()},
                   {"initial_source", to_string(p.source)}, {"parameters", r.x}};
  if (c.reference_energy) j["error_vs_reference"] = r.f - *c.reference_energy;
  write_json(c, "optimize.json", j);
  write_json(c, "circuit.json", circuit_to_json(obj.factors(r.x), p.ints.n_orb()));
  write_manifest(c, "optimize", seeds_of(c));
  if (!r.converged && !r.line_search_failed)
    throw ConvergenceError("BFGS did not converge: " + r.message, 0.0, r.iterations);
}

inline void cmd_amplitudes(const RunConfig& c) {
  if (c.fcidump_path.empty()) throw ConfigError("no FCIDUMP given (--fcidump or \"fcidump\")");
  auto ints = read_fcidump(c.fcidump_path);
  const double e_hf = hf_energy(ints);
  auto mp2 = mp2_amplitudes(ints);
  auto cc = ccsd_solve(ints);
  open_out(c, "amplitudes.json"); // creates the output directory
  write_amplitudes(mp2.amplitudes, out_path(c, "mp2.ampjson").string());
  write_amplitudes(cc.amplitudes, out_path(c, "ccsd.ampjson").string());
  write_json(c, "amplitudes.json",
             {{"e_hf", e_hf}, {"e_mp2", mp2.e_total}, {"e_ccsd", cc.e_total},
              {"ccsd_iterations", cc.iterations}, {"ccsd_residual", cc.residual}});
  write_manifest(c, "amplitudes", {});
}

} // namespace detail

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"energy", "sweep", "extrapolate", "orderings",
                                              "optimize", "amplitudes"};
  return names;
}

/// Run one command, mapping failures to exit codes and reporting on `err`.
inline int run_command(const std::string& command, const RunConfig& c, std::ostream& err = std::cerr) {
  try {
    c.validate();
#ifdef _OPENMP
    if (c.threads > 0) omp_set_num_threads(c.threads);
#endif
    if (command == "energy") detail::cmd_energy(c);
    else if (command == "sweep") detail::cmd_sweep(c);
    else if (command == "extrapolate") detail::cmd_extrapolate(c);
    else if (command == "orderings") detail::cmd_orderings(c);
    else if (command == "optimize") detail::cmd_optimize(c);
    else if (command == "amplitudes") detail::cmd_amplitudes(c);
    else throw ConfigError("unknown command '" + command + "'");
    return exit_ok;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const ConvergenceError& e) {
    err << "convergence failure: " << e.what() << '\n';
    return exit_convergence;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return exit_io;
  } catch (const ParseError& e) {
    err << "malformed input: " << e.what() << '\n';
    return exit_io;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_failure;
  }
}

} // namespace sparse_ucc
