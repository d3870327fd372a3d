/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

/// \file fci.hpp
/// Exact diagonalization over the complete determinant space: dense for small
/// spaces, Davidson with a diagonal preconditioner otherwise. The Hamiltonian
/// is never stored above the dense threshold.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sparse_ucc/determinant.hpp"
#include "sparse_ucc/error.hpp"
#include "sparse_ucc/hamiltonian.hpp"
#include "sparse_ucc/integrals.hpp"
#include "sparse_ucc/wavefunction.hpp"

namespace sparse_ucc {

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

/// All strings of n_orb bits with `count` set, ascending.
inline std::vector<OrbitalMask> occupation_strings(int n_orb, int count) {
  std::vector<OrbitalMask> out;
  if (count == 0) return {0};
  if (count > n_orb) return out;
  OrbitalMask m = low_bits(count);
  const OrbitalMask limit = low_bits(n_orb);
  while (m <= limit) {
    out.push_back(m);
    // Gosper's hack.
    const OrbitalMask c = m & (~m + 1);
    const OrbitalMask r = m + c;
    if (r == 0) break;
    m = (((r ^ m) >> 2) / c) | r;
    if (m & ~limit) break;
  }
  return out;
}

/// Every determinant with fixed (n_alpha, n_beta), canonical order.
class FciSpace {
public:
  FciSpace(int n_orb, int n_alpha, int n_beta)
      : n_orb_(n_orb), n_alpha_(n_alpha), n_beta_(n_beta) {
    if (n_alpha > n_orb || n_beta > n_orb || n_alpha < 0 || n_beta < 0)
      throw RangeError("FCI space: electron counts exceed orbital count");
  }

  std::uint64_t dimension() const {
    return binomial(n_orb_, n_alpha_) * binomial(n_orb_, n_beta_);
  }

  std::vector<Determinant> determinants() const {
    const auto as = occupation_strings(n_orb_, n_alpha_);
    const auto bs = occupation_strings(n_orb_, n_beta_);
    std::vector<Determinant> out;
    out.reserve(as.size() * bs.size());
    for (auto a : as)
      for (auto b : bs) out.push_back({a, b});
    return out;
  }

private:
  int n_orb_, n_alpha_, n_beta_;
};

struct FciOptions {
  std::uint64_t dim_cap = 1'000'000;
  std::size_t dense_threshold = 2000;
  double residual_tol = 1e-9;
  int max_iter = 1000;
  int max_subspace = 40;
};

struct FciResult {
  double energy = 0.0; // total, including e_core
  SparseWavefunction wavefunction;
  int iterations = 0;
  double residual = 0.0;
};

namespace detail {

inline SparseWavefunction to_wavefunction(const std::vector<Determinant>& dets,
                                          const Eigen::VectorXd& x) {
  // Sign fixed so the largest-magnitude coefficient is positive.
  Eigen::Index big = 0;
  x.cwiseAbs().maxCoeff(&big);
  const double sign = x[big] < 0 ? -1.0 : 1.0;
  const double norm = x.norm();
  SparseWavefunction wf;
  wf.reserve(dets.size());
  for (std::size_t k = 0; k < dets.size(); ++k)
    wf.set(dets[k], sign * x[static_cast<Eigen::Index>(k)] / norm);
  return wf;
}

} // namespace detail

/// Lowest eigenpair of H in the (n_alpha, n_beta) sector.
inline FciResult fci_ground_state(const SpatialIntegrals& ints, int n_alpha, int n_beta,
                                  const FciOptions& opt = {}) {
  FciSpace space(ints.n_orb(), n_alpha, n_beta);
  const auto dim = space.dimension();
  if (dim > opt.dim_cap)
    throw DomainError("FCI dimension " + std::to_string(dim) + " exceeds cap " +
                      std::to_string(opt.dim_cap));
  const auto dets = space.determinants();
  const auto n = static_cast<Eigen::Index>(dets.size());
  GroupedSupport support(dets, ints.n_orb());
  FciResult out;

  if (dets.size() <= opt.dense_threshold) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      support.for_each_connected(dets[static_cast<std::size_t>(r)], [&](std::uint32_t j) {
        H(r, j) = slater_condon(dets[static_cast<std::size_t>(r)], dets[j], ints);
      });
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    out.energy = es.eigenvalues()[0] + ints.e_core();
    out.wavefunction = detail::to_wavefunction(dets, es.eigenvectors().col(0));
    out.residual = (H * es.eigenvectors().col(0) - es.eigenvalues()[0] * es.eigenvectors().col(0))
                       .lpNorm<Eigen::Infinity>();
    return out;
  }

  const auto diag = hamiltonian_diagonal(dets, ints);
  auto apply_h = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y(n);
    sigma(support, std::span<const double>(x.data(), static_cast<std::size_t>(n)), ints,
          std::span<double>(y.data(), static_cast<std::size_t>(n)));
    return y;
  };

  std::vector<Eigen::VectorXd> V, AV;
  auto add_vector = [&](Eigen::VectorXd t) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : V) t -= v.dot(t) * v;
    const double nrm = t.norm();
    if (nrm < 1e-12) return false;
    t /= nrm;
    AV.push_back(apply_h(t));
    V.push_back(std::move(t));
    return true;
  };

  Eigen::Index start = 0;
  for (Eigen::Index k = 1; k < n; ++k)
    if (diag[static_cast<std::size_t>(k)] < diag[static_cast<std::size_t>(start)]) start = k;
  add_vector(Eigen::VectorXd::Unit(n, start));

  Eigen::VectorXd x, r;
  double theta = 0.0;
  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    const auto m = static_cast<Eigen::Index>(V.size());
    Eigen::MatrixXd S(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b <= a; ++b) S(a, b) = S(b, a) = V[a].dot(AV[b]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    theta = es.eigenvalues()[0];
    const Eigen::VectorXd y = es.eigenvectors().col(0);
    x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd ax = Eigen::VectorXd::Zero(n);
    for (Eigen::Index a = 0; a < m; ++a) {
      x += y[a] * V[a];
      ax += y[a] * AV[a];
    }
    r = ax - theta * x;
    const double rn = r.norm();
    out.iterations = iter;
    out.residual = rn;
    if (rn < opt.residual_tol) break;
    if (m >= opt.max_subspace) {
      V.clear();
      AV.clear();
      V.push_back(x / x.norm());
      AV.push_back(ax / x.norm());
    }
    Eigen::VectorXd t(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      double den = theta - diag[static_cast<std::size_t>(k)];
      if (std::abs(den) < 1e-8) den = den < 0 ? -1e-8 : 1e-8;
      t[k] = r[k] / den;
    }
    if (!add_vector(std::move(t)) && !add_vector(r)) break;
    if (iter == opt.max_iter)
      throw ConvergenceError("Davidson did not converge (residual " + std::to_string(rn) + ")",
                             rn, iter);
  }
  out.energy = theta + ints.e_core();
  out.wavefunction = detail::to_wavefunction(dets, x);
  return out;
}

} // namespace sparse_ucc
