/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sparse_ucc/driver.hpp"

#include "oracle.hpp"

using namespace sparse_ucc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("sparse_ucc_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string sub(const std::string& s) const { return (path / s).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json load(const std::string& p) { return nlohmann::json::parse(slurp(p)); }

RunConfig h4_config(const TempDir& t, const std::string& out) {
  RunConfig c;
  c.fcidump_path = oracle::fcidump("h4");
  c.output_dir = t.sub(out);
  return c;
}

} // namespace

TEST(Config, ParsesAndValidates) {
  auto c = config_from_json(nlohmann::json::parse(R"({
    "fcidump": "x", "amplitude_source": "mp2", "n_wf": [10, 20, 30], "ordering": "random",
    "seed": 7, "fit": {"window": "above", "n_wf_min": 15, "count": 3}, "max_doubles": null})"));
  EXPECT_EQ(c.amplitude_source, "mp2");
  EXPECT_EQ(c.nwf_grid, (std::vector<std::size_t>{10, 20, 30}));
  EXPECT_EQ(c.ordering_policy().scheme, OrderingScheme::random);
  EXPECT_EQ(c.window().describe(), "smallest_above:15:3");
  EXPECT_NO_THROW(c.validate());
  c.optimize = true;
  EXPECT_THROW(c.validate(), ConfigError); // sweep and optimize together
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"bogus": 1})")), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"seed": "x"})")), ConfigError);
  RunConfig two;
  two.amplitude_source = "ccsd";
  two.amplitude_file = "a.json";
  EXPECT_THROW(two.validate(), ConfigError);
  auto g = config_from_json(nlohmann::json::parse(R"({"nwf_grid": {"min": 100, "max": 100000, "count": 40}})"));
  EXPECT_EQ(g.nwf_grid, default_nwf_grid());
}

TEST(Cli, ExitCodes) {
  TempDir t("exit");
  std::ostringstream err;
  RunConfig c = h4_config(t, "o");
  c.fcidump_path = t.sub("missing");
  EXPECT_EQ(run_command("energy", c, err), exit_io);
  c = h4_config(t, "o");
  c.ordering = "sideways";
  EXPECT_EQ(run_command("energy", c, err), exit_config);
  c = h4_config(t, "o");
  EXPECT_EQ(run_command("launch", c, err), exit_config);
  c.nwf_grid = {10, 20};
  EXPECT_EQ(run_command("energy", c, err), exit_config);
  // An optimizer starved of iterations reports a convergence failure.
  c = h4_config(t, "o");
  c.optimize = true;
  c.opt_max_iter = 1;
  c.opt_tol = 1e-12;
  c.amplitude_source = "mp2";
  EXPECT_EQ(run_command("optimize", c, err), exit_convergence);
}

TEST(Cli, EnergyWritesArtifactsAndManifest) {
  TempDir t("energy");
  auto c = h4_config(t, "o");
  ASSERT_EQ(run_command("energy", c), exit_ok);
  auto e = load(t.sub("o/energy.json"));
  for (const char* k : {"e_total", "e_corr", "e_hf", "peak_support", "factor_count"}) EXPECT_TRUE(e.contains(k)) << k;
  EXPECT_NEAR(e["e_hf"].get<double>(), oracle::reference("h4")["e_hf"].get<double>(), 1e-8);
  auto m = load(t.sub("o/manifest.json"));
  EXPECT_EQ(m["command"], "energy");
  EXPECT_EQ(m["config_hash"].get<std::string>().size(), 16u);
  // Same manifest => same primary outputs.
  auto c2 = h4_config(t, "o2");
  c2.output_dir = c.output_dir;
  ASSERT_EQ(run_command("energy", c2), exit_ok);
  EXPECT_EQ(load(t.sub("o/manifest.json")), m);
  EXPECT_NEAR(load(t.sub("o/energy.json"))["e_total"].get<double>(), e["e_total"].get<double>(), 1e-10);
}

TEST(Cli, ZeroAmplitudesGiveZeroCorrelation) {
  TempDir t("zero");
  {
    std::ofstream f(t.sub("zero.ampjson"));
    f << R"({"n_orb": 4, "n_occ": 2, "t1": [], "t2": []})";
  }
  auto c = h4_config(t, "o");
  c.amplitude_source = "file";
  c.amplitude_file = t.sub("zero.ampjson");
  ASSERT_EQ(run_command("energy", c), exit_ok);
  EXPECT_NEAR(load(t.sub("o/energy.json"))["e_corr"].get<double>(), 0.0, 1e-14);
}

TEST(Cli, FileSourceMatchesInProcessCcsd) {
  TempDir t("file");
  auto c = h4_config(t, "amps");
  ASSERT_EQ(run_command("amplitudes", c), exit_ok);
  auto direct = h4_config(t, "direct");
  ASSERT_EQ(run_command("energy", direct), exit_ok);
  auto viafile = h4_config(t, "viafile");
  viafile.amplitude_source = "file";
  viafile.amplitude_file = t.sub("amps/ccsd.ampjson");
  ASSERT_EQ(run_command("energy", viafile), exit_ok);
  EXPECT_NEAR(load(t.sub("viafile/energy.json"))["e_total"].get<double>(),
              load(t.sub("direct/energy.json"))["e_total"].get<double>(), 1e-12);
  auto summary = load(t.sub("amps/amplitudes.json"));
  EXPECT_NEAR(summary["e_ccsd"].get<double>(), oracle::reference("h4")["e_ccsd"].get<double>(), 1e-7);
}

TEST(Cli, ExtrapolateRecoversSyntheticCoefficients) {
  TempDir t("extrap");
  {
    std::ofstream f(t.sub("sweep.csv"));
    f << std::setprecision(17) << "n_wf,e_total,e_corr\n";
    for (auto n : default_nwf_grid()) {
      const double x = 1.0 / static_cast<double>(n);
      f << n << ',' << 0.0 << ',' << (3.0 * x * x - 0.4 * x - 0.125) << '\n';
    }
  }
  RunConfig c;
  c.sweep_csv = t.sub("sweep.csv");
  c.output_dir = t.sub("o");
  ASSERT_EQ(run_command("extrapolate", c), exit_ok);
  auto fit = load(t.sub("o/fit.json"));
  EXPECT_NEAR(fit["c"].get<double>(), -0.125, 1e-12);
  EXPECT_NEAR(fit["b"].get<double>(), -0.4, 1e-8);
  EXPECT_EQ(fit["n_points"], 20);
}

TEST(Cli, SweepThenExtrapolate) {
  TempDir t("sweep");
  auto c = h4_config(t, "o");
  c.nwf_grid = {4, 6, 8, 10, 12, 16, 20, 24, 30, 36};
  c.fit_count = 6;
  ASSERT_EQ(run_command("sweep", c), exit_ok);
  ASSERT_EQ(run_command("extrapolate", c), exit_ok);
  auto fit = load(t.sub("o/fit.json"));
  EXPECT_TRUE(std::isfinite(fit["c"].get<double>()));
  EXPECT_EQ(slurp(t.sub("o/sweep.csv")).rfind("n_wf,e_total,e_corr\n", 0), 0u);
}

TEST(Cli, OrderingsAreByteReproducible) {
  TempDir t("orders");
  auto c = h4_config(t, "a");
  c.n_orderings = 5;
  c.seed = 1234;
  c.n_wf = 10;
  ASSERT_EQ(run_command("orderings", c), exit_ok);
  c.output_dir = t.sub("b");
  c.threads = 1;
  ASSERT_EQ(run_command("orderings", c), exit_ok);
  EXPECT_EQ(slurp(t.sub("a/orderings.csv")), slurp(t.sub("b/orderings.csv")));
  EXPECT_EQ(load(t.sub("a/manifest.json"))["seeds"].size(), 5u);
}

TEST(Cli, OptimizeWritesTrace) {
  TempDir t("opt");
  auto c = h4_config(t, "o");
  c.optimize = true;
  c.symmetry_reduction = true;
  c.reference_energy = oracle::reference("h4")["e_fci"].get<double>();
  ASSERT_EQ(run_command("optimize", c), exit_ok);
  auto r = load(t.sub("o/optimize.json"));
  EXPECT_TRUE(r["converged"].get<bool>());
  EXPECT_LT(r["error_vs_reference"].get<double>(), 1e-4);
  EXPECT_GE(r["error_vs_reference"].get<double>(), -1e-9);
  EXPECT_LT(r["n_parameters"].get<int>(), r["pool_size"].get<int>());
  EXPECT_EQ(slurp(t.sub("o/trace.csv")).rfind("iteration,e_total,e_corr,grad_norm,n_evals\n", 0), 0u);
}
