/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

/// \file hamiltonian.hpp
/// Action of the Hamiltonian on vectors supported on an arbitrary set of
/// determinants. Determinants are grouped by alpha string so that pairs
/// separated by more than a double excitation are never visited.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <unordered_map>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sparse_ucc/determinant.hpp"
#include "sparse_ucc/integrals.hpp"

namespace sparse_ucc {

namespace detail {

/// Call f(new_mask) for every string reachable from m by one substitution
/// within the first n_orb orbitals.
template <typename F> void for_each_single_string(OrbitalMask m, int n_orb, F&& f) {
  const OrbitalMask vir = low_bits(n_orb) & ~m;
  for_each_bit(m, [&](int i) {
    for_each_bit(vir, [&](int a) { f(m ^ bit(i) ^ bit(a)); });
  });
}

template <typename F> void for_each_double_string(OrbitalMask m, int n_orb, F&& f) {
  const OrbitalMask vir = low_bits(n_orb) & ~m;
  for_each_bit(m, [&](int i) {
    for_each_bit(m & ~(bit(i + 1) - 1), [&](int j) {
      for_each_bit(vir, [&](int a) {
        for_each_bit(vir & ~(bit(a + 1) - 1), [&](int b) {
          f(m ^ bit(i) ^ bit(j) ^ bit(a) ^ bit(b));
        });
      });
    });
  });
}

inline std::size_t n_singles(OrbitalMask m, int n_orb) {
  const auto o = static_cast<std::size_t>(std::popcount(m));
  return o * (static_cast<std::size_t>(n_orb) - o);
}

inline std::size_t n_doubles(OrbitalMask m, int n_orb) {
  const auto o = static_cast<std::size_t>(std::popcount(m));
  const auto v = static_cast<std::size_t>(n_orb) - o;
  return o * (o - (o > 0)) / 2 * (v * (v - (v > 0)) / 2);
}

} // namespace detail

/// Index over a fixed list of determinants, grouped by alpha string.
class GroupedSupport {
public:
  GroupedSupport(std::span<const Determinant> dets, int n_orb)
      : dets_(dets), n_orb_(n_orb) {
    for (std::uint32_t k = 0; k < dets.size(); ++k) {
      auto [it, inserted] =
          alpha_index_.try_emplace(dets[k].alpha, static_cast<std::uint32_t>(groups_.size()));
      if (inserted) groups_.push_back(Group{dets[k].alpha, {}, {}});
      Group& g = groups_[it->second];
      g.members.push_back({dets[k].beta, k});
      g.beta_index.emplace(dets[k].beta, k);
    }
  }

  std::size_t size() const noexcept { return dets_.size(); }
  std::size_t n_groups() const noexcept { return groups_.size(); }
  std::span<const Determinant> determinants() const noexcept { return dets_; }

  /// Call f(j) for every support index j with excitation_degree(d, dets[j]) <= 2.
  template <typename F> void for_each_connected(const Determinant& d, F&& f) const {
    auto visit_group = [&](const Group& g, int alpha_degree) {
      if (alpha_degree == 2) {
        if (auto it = g.beta_index.find(d.beta); it != g.beta_index.end()) f(it->second);
        return;
      }
      const int max_beta = 2 - alpha_degree;
      std::size_t generated = 1 + detail::n_singles(d.beta, n_orb_);
      if (max_beta == 2) generated += detail::n_doubles(d.beta, n_orb_);
      if (g.members.size() <= generated) {
        const int nb = std::popcount(d.beta);
        for (const auto& [b, j] : g.members) {
          if (std::popcount(b) != nb) continue;
          if (std::popcount(b ^ d.beta) / 2 <= max_beta) f(j);
        }
        return;
      }
      auto probe = [&](OrbitalMask b) {
        if (auto it = g.beta_index.find(b); it != g.beta_index.end()) f(it->second);
      };
      probe(d.beta);
      detail::for_each_single_string(d.beta, n_orb_, probe);
      if (max_beta == 2) detail::for_each_double_string(d.beta, n_orb_, probe);
    };

    const std::size_t generated = 1 + detail::n_singles(d.alpha, n_orb_) +
                                  detail::n_doubles(d.alpha, n_orb_);
    if (groups_.size() <= generated) {
      const int na = std::popcount(d.alpha);
      for (const Group& g : groups_) {
        if (std::popcount(g.alpha) != na) continue;
        const int deg = std::popcount(g.alpha ^ d.alpha) / 2;
        if (deg <= 2) visit_group(g, deg);
      }
      return;
    }
    auto probe = [&](OrbitalMask a, int deg) {
      if (auto it = alpha_index_.find(a); it != alpha_index_.end())
        visit_group(groups_[it->second], deg);
    };
    probe(d.alpha, 0);
    detail::for_each_single_string(d.alpha, n_orb_, [&](OrbitalMask a) { probe(a, 1); });
    detail::for_each_double_string(d.alpha, n_orb_, [&](OrbitalMask a) { probe(a, 2); });
  }

private:
  struct Group {
    OrbitalMask alpha;
    std::vector<std::pair<OrbitalMask, std::uint32_t>> members;
    std::unordered_map<OrbitalMask, std::uint32_t> beta_index;
  };

  std::span<const Determinant> dets_;
  int n_orb_;
  std::vector<Group> groups_;
  std::unordered_map<OrbitalMask, std::uint32_t> alpha_index_;
};

/// sigma = H c restricted to the support (core energy excluded). Rows are
/// independent, so the result does not depend on the thread count.
inline void sigma(const GroupedSupport& support, std::span<const double> c,
                  const SpatialIntegrals& ints, std::span<double> out) {
  const auto dets = support.determinants();
  const auto n = static_cast<std::int64_t>(dets.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 32)
#endif
  for (std::int64_t r = 0; r < n; ++r) {
    const Determinant& dr = dets[static_cast<std::size_t>(r)];
    double acc = 0.0;
    support.for_each_connected(dr, [&](std::uint32_t j) {
      if (c[j] != 0.0) acc += slater_condon(dr, dets[j], ints) * c[j];
    });
    out[static_cast<std::size_t>(r)] = acc;
  }
}

/// Diagonal of H over a determinant list (core energy excluded).
inline std::vector<double> hamiltonian_diagonal(std::span<const Determinant> dets,
                                                const SpatialIntegrals& ints) {
  std::vector<double> d(dets.size());
  for (std::size_t k = 0; k < dets.size(); ++k) d[k] = detail::diagonal_element(dets[k], ints);
  return d;
}

} // namespace sparse_ucc
