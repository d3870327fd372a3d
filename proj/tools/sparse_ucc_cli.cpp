/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
// Command-line front end: sparse_ucc <command> [--config FILE] [flags].

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "sparse_ucc/driver.hpp"

int main(int argc, char** argv) {
  using namespace sparse_ucc;
  CLI::App app{"Sparse-wavefunction emulator for factorized UCCSD circuits"};
  app.set_version_flag("--version", std::string(SPARSE_UCC_VERSION));
  app.require_subcommand(1);

  std::string config_path, fcidump, out;
  std::size_t n_wf = 0;
  std::uint64_t seed = 0;
  int threads = 0;

  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--fcidump", fcidump, "FCIDUMP integral file (overrides config)");
    sub->add_option("--nwf", n_wf, "determinant cap N_WF (overrides config)");
    sub->add_option("--seed", seed, "random seed (overrides config)");
    sub->add_option("--threads", threads, "worker threads; results do not depend on it");
    sub->add_option("--out", out, "output directory (overrides config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_config;
  }

  auto* sub = app.get_subcommands().front();
  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = read_config(config_path);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return exit_io;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  }
  // Flags win over the config file.
  if (sub->count("--fcidump")) cfg.fcidump_path = fcidump;
  if (sub->count("--nwf")) {
    cfg.n_wf = n_wf;
    cfg.nwf_grid.clear();
  }
  if (sub->count("--seed")) cfg.seed = seed;
  if (sub->count("--threads")) cfg.threads = threads;
  if (sub->count("--out")) cfg.output_dir = out;
  return run_command(sub->get_name(), cfg);
}
