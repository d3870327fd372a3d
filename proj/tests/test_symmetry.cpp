/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#include <gtest/gtest.h>

#include <map>
#include <set>

#include "oracle.hpp"

using namespace sparse_ucc;

TEST(PointGroup, IrrepProductIsXorOfLabels) {
  std::vector<int> sym{1, 2, 3, 4, 5, 6, 7, 8};
  auto op = ExcitationOp::double_(alpha(0), beta(1), alpha(2), beta(3)); // 0^1^2^3
  EXPECT_EQ(irrep_product(op, sym), 0 ^ 1 ^ 2 ^ 3);
  EXPECT_EQ(irrep_product(ExcitationOp::single(alpha(4), alpha(5)), sym), 4 ^ 5);
  std::vector<int> bad{1, 9, 1, 1, 1, 1, 1, 1};
  EXPECT_THROW(irrep_product(op, bad), UnsupportedError);
  EXPECT_THROW(irrep_product(op, std::vector<int>{1, 1}), RangeError);
}

TEST(PointGroup, FilterKeepsOnlyHamiltonianCoupledOperators) {
  // A filtered-out operator acting on the reference reaches a determinant
  // with zero Hamiltonian coupling to every kept-symmetry determinant, so
  // in particular <D|H|HF> = 0.
  auto I = read_fcidump(oracle::fcidump("h8"));
  PoolOptions po{4, 8, true, std::nullopt, std::nullopt};
  auto all = build_pool(po);
  po.orb_sym = I.orb_sym();
  auto kept = build_pool(po);
  EXPECT_LT(kept.size(), all.size());
  std::set<ExcitationOp> k(kept.begin(), kept.end());
  const auto ref = reference_determinant(I);
  for (const auto& op : all) {
    if (k.count(op)) continue;
    auto d = apply_excitation(ref, op);
    ASSERT_TRUE(d);
    EXPECT_NEAR(slater_condon(d->det, ref, I), 0.0, 1e-10);
  }
}

TEST(SpinComplement, ClassesPartitionPoolWithMirrorPairs) {
  PoolOptions po{3, 7, true, std::nullopt, std::nullopt};
  auto pool = build_pool(po);
  auto classes = spin_complement_classes(pool);
  std::vector<int> hits(pool.size(), 0);
  std::size_t pairs = 0, self_mirror = 0;
  for (const auto& c : classes) {
    EXPECT_EQ(c.signs.front(), 1);
    for (auto m : c.members) ++hits[m];
    if (c.members.size() == 2) {
      ++pairs;
      EXPECT_EQ(pool[c.members[0]].spin_mirror().canonical().first, pool[c.members[1]]);
    } else {
      const auto& op = pool[c.members[0]];
      if (op.spin_mirror().canonical().first == op) ++self_mirror;
    }
  }
  for (int h : hits) EXPECT_EQ(h, 1);
  // Orbit count by hand: alpha/alpha ops pair with beta/beta ones; mixed
  // doubles (i a, j b -> a a, b b) pair with (j a, i b -> b a, a b), which is
  // the same operator when i == j and a == b.
  const std::size_t no = 3, nv = 4;
  const std::size_t same_spin = no * nv + (no * (no - 1) / 2) * (nv * (nv - 1) / 2);
  const std::size_t mixed = no * no * nv * nv, mixed_fixed = no * nv;
  EXPECT_EQ(self_mirror, mixed_fixed);
  EXPECT_EQ(classes.size(), same_spin + mixed_fixed + (mixed - mixed_fixed) / 2);
  EXPECT_EQ(pairs, same_spin + (mixed - mixed_fixed) / 2);
}

TEST(SpinComplement, SingletAmplitudesSurviveReduceExpand) {
  for (const char* sys : {"h4", "h8"}) {
    auto I = read_fcidump(oracle::fcidump(sys));
    PoolOptions po{I.n_occ(), I.n_orb(), true, std::nullopt, std::nullopt};
    auto pool = build_pool(po);
    auto classes = spin_complement_classes(pool);
    for (const auto& amps : {mp2_amplitudes(I).amplitudes, ccsd_solve(I).amplitudes}) {
      auto theta = amplitudes_to_parameters(amps, pool);
      auto back = expand_parameters(reduce_parameters(theta, classes), classes, pool.size());
      for (std::size_t k = 0; k < theta.size(); ++k) ASSERT_NEAR(back[k], theta[k], 1e-10) << sys << " " << k;
    }
  }
}

TEST(SpinComplement, IdentityClassesAndSizeCheck) {
  auto c = identity_classes(3);
  EXPECT_EQ(expand_parameters(std::vector<double>{1, 2, 3}, c, 3), (std::vector<double>{1, 2, 3}));
  EXPECT_THROW(expand_parameters(std::vector<double>{1, 2}, c, 3), DomainError);
}

TEST(Symmetry, LithiumHydrideParameterCount) {
  auto I = read_fcidump(oracle::fcidump("lih_ccpcvdz"));
  PoolOptions po{I.n_occ(), I.n_orb(), true, std::nullopt, std::nullopt};
  EXPECT_EQ(build_pool(po).size(), 2268u);
  po.orb_sym = I.orb_sym();
  auto pool = build_pool(po);
  EXPECT_EQ(spin_complement_classes(pool).size(), 408u);
}
