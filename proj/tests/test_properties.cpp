/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
// Randomized property checks over the checked-in fixtures.

#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "oracle.hpp"

using namespace sparse_ucc;

namespace {

struct System {
  SpatialIntegrals ints;
  std::vector<ExcitationOp> pool;
  double e_fci;
};

System load(const char* name) {
  auto I = read_fcidump(oracle::fcidump(name));
  auto pool = build_pool({I.n_occ(), I.n_orb(), true, std::nullopt, std::nullopt});
  return {std::move(I), std::move(pool), oracle::reference(name)["e_fci"].get<double>()};
}

std::vector<UccFactor> random_factors(const System& s, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> theta(s.pool.size());
  for (auto& t : theta) t = u(rng);
  return order_factors(make_factors(s.pool, theta), Ordering::random(rng()));
}

} // namespace

TEST(Property, UntruncatedCircuitsAreUnitary) {
  std::mt19937_64 rng(2024);
  for (const char* name : {"h4", "h8"}) {
    auto s = load(name);
    for (int trial = 0; trial < 4; ++trial) {
      CircuitSpec spec;
      spec.factors = random_factors(s, rng, 0.4);
      auto r = run_circuit(reference_determinant(s.ints), spec, s.ints);
      EXPECT_NEAR(r.wavefunction.norm_squared(), 1.0, 1e-10) << name;
    }
  }
}

TEST(Property, FactorInverseRoundTrip) {
  std::mt19937_64 rng(77);
  auto s = load("h8");
  const auto basis = oracle::fci_basis(8, 4, 4);
  std::uniform_real_distribution<double> u(-1, 1);
  SparseWavefunction psi;
  for (const auto& d : basis)
    if (u(rng) > 0.6) psi.set(d, u(rng));
  for (int trial = 0; trial < 50; ++trial) {
    const auto& op = s.pool[rng() % s.pool.size()];
    const double th = 2 * u(rng);
    auto back = apply_factor(apply_factor(psi, {op, th}), {op, -th});
    double worst = 0.0;
    for (const auto& d : basis) worst = std::max(worst, std::abs(back.amplitude(d) - psi.amplitude(d)));
    ASSERT_LT(worst, 1e-12);
  }
}

TEST(Property, CircuitMatchesDenseExponentialProduct) {
  std::mt19937_64 rng(5);
  auto s = load("h4");
  const auto basis = oracle::fci_basis(4, 2, 2); // 36 determinants
  for (int trial = 0; trial < 3; ++trial) {
    auto factors = random_factors(s, rng, 0.8);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(36);
    v[0] = 1.0; // basis[0] is the reference determinant
    ASSERT_EQ(basis[0], reference_determinant(s.ints));
    for (const auto& f : factors) {
      auto G = oracle::dense_matrix(basis, 4, [&](const oracle::State& st) { return oracle::apply_generator(st, f.op, 4); });
      v = (f.theta * G).exp() * v;
    }
    CircuitSpec spec;
    spec.factors = factors;
    auto r = run_circuit(reference_determinant(s.ints), spec, s.ints);
    EXPECT_LT((oracle::to_dense(r.wavefunction, basis) - v).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(Property, RayleighQuotientScaleInvariance) {
  std::mt19937_64 rng(8);
  auto s = load("h8");
  CircuitSpec spec;
  spec.factors = random_factors(s, rng, 0.3);
  spec.n_wf = 300;
  auto wf = run_circuit(reference_determinant(s.ints), spec, s.ints).wavefunction;
  const double e = energy(wf, s.ints);
  for (double k : {1e-3, 0.7, -2.0, 1e3}) {
    auto w = wf;
    w.scale(k);
    EXPECT_NEAR(energy(w, s.ints), e, 1e-12) << k;
  }
}

TEST(Property, ExtrapolationExactOnRandomQuadratics) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto grid = default_nwf_grid();
  for (int trial = 0; trial < 20; ++trial) {
    const double a = 100 * u(rng), b = u(rng), c = -0.2 + 0.1 * u(rng);
    SweepSeries s;
    for (auto n : grid) {
      const double x = 1.0 / static_cast<double>(n);
      s.points.push_back({n, 0.0, a * x * x + b * x + c, 0});
    }
    EXPECT_NEAR(extrapolate(s).c, c, 1e-12);
  }
}

TEST(Property, VariationalFloor) {
  std::mt19937_64 rng(99);
  for (const char* name : {"h4", "h8"}) {
    auto s = load(name);
    for (std::size_t n_wf : {std::size_t{20}, std::size_t{200}, unlimited_nwf}) {
      for (int trial = 0; trial < 3; ++trial) {
        CircuitSpec spec;
        spec.factors = random_factors(s, rng, 0.3);
        spec.n_wf = n_wf;
        EXPECT_GE(run_circuit(reference_determinant(s.ints), spec, s.ints).energy, s.e_fci - 1e-9) << name;
      }
    }
  }
}

TEST(Property, ThreadCountDoesNotChangeEnergy) {
#ifdef _OPENMP
  std::mt19937_64 rng(4);
  auto s = load("h8");
  CircuitSpec spec;
  spec.factors = random_factors(s, rng, 0.3);
  auto wf = run_circuit(reference_determinant(s.ints), spec, s.ints).wavefunction;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double e1 = energy(wf, s.ints);
  omp_set_num_threads(4);
  const double e4 = energy(wf, s.ints);
  omp_set_num_threads(saved);
  EXPECT_EQ(e1, e4);
#else
  GTEST_SKIP() << "built without OpenMP";
#endif
}
