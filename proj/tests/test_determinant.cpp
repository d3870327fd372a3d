/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#include <gtest/gtest.h>

#include "oracle.hpp"

using namespace sparse_ucc;

namespace {

std::vector<ExcitationOp> every_op(int n_orb) {
  std::vector<SpinOrbital> so;
  for (int p = 0; p < n_orb; ++p) so.push_back(alpha(p));
  for (int p = 0; p < n_orb; ++p) so.push_back(beta(p));
  std::vector<ExcitationOp> out;
  for (auto i : so)
    for (auto a : so)
      if (i != a && i.spin == a.spin) out.push_back(ExcitationOp::single(i, a));
  for (auto i : so)
    for (auto j : so)
      for (auto a : so)
        for (auto b : so) {
          try {
            out.push_back(ExcitationOp::double_(i, j, a, b));
          } catch (const DomainError&) {
          }
        }
  return out;
}

} // namespace

TEST(Excitation, MatchesLadderOperatorOracle) {
  const int n = 3;
  const auto ops = every_op(n);
  std::size_t checked = 0;
  for (int na = 0; na <= n; ++na)
    for (int nb = 0; nb <= n; ++nb)
      for (const auto& d : oracle::fci_basis(n, na, nb))
        for (const auto& op : ops) {
          oracle::State s{{oracle::occ_of(d, n), 1.0}};
          std::vector<std::pair<int, bool>> str;
          for (auto p : op.create()) str.emplace_back(p.linear(n), true);
          for (auto k = op.annihilate().size(); k-- > 0;)
            str.emplace_back(op.annihilate()[k].linear(n), false);
          auto ref = oracle::apply_string(s, str);
          auto got = apply_excitation(d, op);
          ASSERT_EQ(got.has_value(), !ref.empty());
          if (got) {
            ASSERT_EQ(oracle::det_of(ref.begin()->first, n), got->det);
            ASSERT_EQ(ref.begin()->second, got->phase) << to_string(d);
          }
          ++checked;
        }
  EXPECT_GT(checked, 5000u);
}

TEST(Excitation, ValidationRejectsIllFormedOperators) {
  EXPECT_THROW(ExcitationOp::single(alpha(0), beta(1)), DomainError);
  EXPECT_THROW(ExcitationOp::single(alpha(1), alpha(1)), DomainError);
  EXPECT_THROW(ExcitationOp::double_(alpha(0), alpha(0), alpha(2), alpha(3)), DomainError);
  EXPECT_THROW(ExcitationOp::double_(alpha(0), alpha(1), alpha(1), alpha(3)), DomainError);
  EXPECT_THROW(ExcitationOp::double_(alpha(0), alpha(1), alpha(2), beta(3)), DomainError);
  EXPECT_NO_THROW(ExcitationOp::double_(alpha(0), beta(1), beta(2), alpha(3)));
}

TEST(Excitation, CanonicalFormSign) {
  auto op = ExcitationOp::double_(alpha(1), alpha(0), alpha(2), alpha(3));
  auto [c, s] = op.canonical();
  EXPECT_EQ(s, -1);
  EXPECT_TRUE(c.is_canonical());
  auto d = hartree_fock_det(2, 2, 4);
  EXPECT_EQ(apply_excitation(d, op)->phase, -apply_excitation(d, c)->phase);
  EXPECT_EQ(apply_excitation(d, op)->det, apply_excitation(d, c)->det);
}

TEST(Excitation, ConjugateUndoes) {
  auto d = hartree_fock_det(2, 2, 4);
  auto op = ExcitationOp::double_(alpha(0), beta(1), alpha(3), beta(2));
  auto up = apply_excitation(d, op);
  ASSERT_TRUE(up);
  auto down = apply_excitation(up->det, op.conjugate());
  ASSERT_TRUE(down);
  EXPECT_EQ(down->det, d);
  EXPECT_EQ(down->phase, up->phase);
}

TEST(Determinant, Basics) {
  auto d = hartree_fock_det(3, 2, 5);
  EXPECT_EQ(d.alpha, 0b111u);
  EXPECT_EQ(d.beta, 0b11u);
  EXPECT_EQ(d.n_elec(), 5);
  EXPECT_EQ(to_string(d), "α:{0,1,2}|β:{0,1}");
  EXPECT_THROW(hartree_fock_det(6, 2, 5), RangeError);
  EXPECT_EQ(excitation_degree(d, Determinant{0b1011, 0b101}), 2);
  EXPECT_THROW(excitation_degree(d, Determinant{0b1, 0b1}), DomainError);
}

class SlaterCondon : public ::testing::TestWithParam<const char*> {};

TEST_P(SlaterCondon, AgreesWithSecondQuantizedHamiltonian) {
  auto I = read_fcidump(oracle::fcidump(GetParam()));
  const int n = I.n_orb(), no = I.n_occ();
  const auto basis = oracle::fci_basis(n, no, no);
  auto H = oracle::dense_matrix(basis, n, [&](const oracle::State& s) { return oracle::apply_h(s, I); });
  double worst = 0.0;
  for (std::size_t r = 0; r < basis.size(); ++r)
    for (std::size_t c = 0; c < basis.size(); ++c)
      worst = std::max(worst, std::abs(slater_condon(basis[r], basis[c], I) -
                                       H(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
  EXPECT_LT(worst, 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Systems, SlaterCondon, ::testing::Values("h2", "h4"));

TEST(SlaterCondon, OpenShellSectorsAgreeWithOracle) {
  auto I = read_fcidump(oracle::fcidump("h4"));
  const int n = I.n_orb();
  for (auto [na, nb] : {std::pair{3, 1}, std::pair{1, 2}, std::pair{3, 3}}) {
    const auto basis = oracle::fci_basis(n, na, nb);
    auto H = oracle::dense_matrix(basis, n, [&](const oracle::State& s) { return oracle::apply_h(s, I); });
    for (std::size_t r = 0; r < basis.size(); ++r)
      for (std::size_t c = 0; c < basis.size(); ++c)
        ASSERT_NEAR(slater_condon(basis[r], basis[c], I),
                    H(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)), 1e-12);
  }
}

TEST(SlaterCondon, ZeroBeyondDoubles) {
  auto I = read_fcidump(oracle::fcidump("h4"));
  EXPECT_EQ(slater_condon(hartree_fock_det(2, 2, 4), Determinant{0b1100, 0b1010}, I), 0.0);
}
