/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

/// \file wavefunction.hpp
/// Sparse determinant expansion with magnitude truncation and
/// Rayleigh-quotient energy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sparse_ucc/determinant.hpp"
#include "sparse_ucc/error.hpp"
#include "sparse_ucc/hamiltonian.hpp"
#include "sparse_ucc/integrals.hpp"

namespace sparse_ucc {

/// Map from determinants to real amplitudes. Storage is a pair of parallel
/// arrays plus a hash index; iteration order is insertion order modulo
/// removals (use canonical_entries() for a sorted view).
class SparseWavefunction {
public:
  /// Amplitudes below this magnitude are dropped by mutating operations.
  static constexpr double zero_tolerance = 1e-14;

  SparseWavefunction() = default;
  explicit SparseWavefunction(const Determinant& d, double c = 1.0) { set(d, c); }

  std::size_t size() const noexcept { return dets_.size(); }
  bool empty() const noexcept { return dets_.empty(); }

  std::span<const Determinant> determinants() const noexcept { return dets_; }
  std::span<const double> amplitudes() const noexcept { return coefs_; }

  std::optional<std::size_t> find(const Determinant& d) const {
    auto it = index_.find(d);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  double amplitude(const Determinant& d) const {
    auto k = find(d);
    return k ? coefs_[*k] : 0.0;
  }

  void set(const Determinant& d, double c) {
    if (auto k = find(d)) {
      if (std::abs(c) < zero_tolerance)
        swap_remove(*k);
      else
        coefs_[*k] = c;
    } else if (std::abs(c) >= zero_tolerance) {
      push(d, c);
    }
  }
  void add(const Determinant& d, double c) { set(d, amplitude(d) + c); }

  void scale(double s) {
    for (auto& c : coefs_) c *= s;
    prune_zeros();
  }

  /// Index of d, appending it with amplitude 0 if absent. The zero entry
  /// must be filled or removed by prune_zeros() before the mutation ends.
  std::size_t find_or_insert_zero(const Determinant& d) {
    auto [it, inserted] = index_.try_emplace(d, dets_.size());
    if (inserted) {
      dets_.push_back(d);
      coefs_.push_back(0.0);
    }
    return it->second;
  }
  double& amplitude_at(std::size_t k) noexcept { return coefs_[k]; }
  double amplitude_at(std::size_t k) const noexcept { return coefs_[k]; }
  void reserve(std::size_t n) {
    dets_.reserve(n);
    coefs_.reserve(n);
    index_.reserve(n);
  }

  void prune_zeros() {
    for (std::size_t k = dets_.size(); k-- > 0;)
      if (std::abs(coefs_[k]) < zero_tolerance) swap_remove(k);
  }

  /// Remove entries with indices in `candidates` whose amplitude fell below
  /// the zero tolerance.
  void prune_zeros(std::vector<std::size_t> candidates) {
    std::sort(candidates.begin(), candidates.end(), std::greater<>());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (auto k : candidates)
      if (k < dets_.size() && std::abs(coefs_[k]) < zero_tolerance) swap_remove(k);
  }

  /// Keep the n entries of largest |amplitude|; ties go to the smaller
  /// determinant. No-op when size() <= n. No renormalization.
  void truncate_to(std::size_t n) {
    if (n == 0) throw DomainError("truncate: n_wf must be at least 1");
    if (dets_.size() <= n) return;
    std::vector<std::uint32_t> order(dets_.size());
    std::iota(order.begin(), order.end(), 0u);
    auto better = [&](std::uint32_t a, std::uint32_t b) {
      const double ma = std::abs(coefs_[a]), mb = std::abs(coefs_[b]);
      if (ma != mb) return ma > mb;
      return dets_[a] < dets_[b];
    };
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n),
                     order.end(), better);
    const std::size_t removed = dets_.size() - n;
    if (removed * 4 < dets_.size()) {
      std::vector<std::uint32_t> drop(order.begin() + static_cast<std::ptrdiff_t>(n), order.end());
      std::sort(drop.begin(), drop.end(), std::greater<>());
      for (auto k : drop) swap_remove(k);
      return;
    }
    std::vector<std::uint32_t> keep(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
    std::sort(keep.begin(), keep.end());
    std::vector<Determinant> dets;
    std::vector<double> coefs;
    dets.reserve(n);
    coefs.reserve(n);
    for (auto k : keep) {
      dets.push_back(dets_[k]);
      coefs.push_back(coefs_[k]);
    }
    dets_ = std::move(dets);
    coefs_ = std::move(coefs);
    index_.clear();
    index_.reserve(n);
    for (std::size_t k = 0; k < dets_.size(); ++k) index_.emplace(dets_[k], k);
  }

  /// Entries sorted by the canonical determinant order.
  std::vector<std::pair<Determinant, double>> canonical_entries() const {
    std::vector<std::pair<Determinant, double>> out;
    out.reserve(dets_.size());
    for (std::size_t k = 0; k < dets_.size(); ++k) out.emplace_back(dets_[k], coefs_[k]);
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
  }

  double norm_squared() const noexcept {
    double s = 0.0;
    for (double c : coefs_) s += c * c;
    return s;
  }

private:
  void push(const Determinant& d, double c) {
    index_.emplace(d, dets_.size());
    dets_.push_back(d);
    coefs_.push_back(c);
  }
  void swap_remove(std::size_t k) {
    index_.erase(dets_[k]);
    const std::size_t last = dets_.size() - 1;
    if (k != last) {
      dets_[k] = dets_[last];
      coefs_[k] = coefs_[last];
      index_[dets_[k]] = k;
    }
    dets_.pop_back();
    coefs_.pop_back();
  }

  std::vector<Determinant> dets_;
  std::vector<double> coefs_;
  std::unordered_map<Determinant, std::size_t, DeterminantHash> index_;
};

inline SparseWavefunction truncate(SparseWavefunction wf, std::size_t n_wf) {
  wf.truncate_to(n_wf);
  return wf;
}

/// Sum over shared determinants of c1*c2.
inline double inner(const SparseWavefunction& w1, const SparseWavefunction& w2) {
  const SparseWavefunction& small = w1.size() <= w2.size() ? w1 : w2;
  const SparseWavefunction& large = w1.size() <= w2.size() ? w2 : w1;
  double s = 0.0;
  auto dets = small.determinants();
  auto coefs = small.amplitudes();
  for (std::size_t k = 0; k < dets.size(); ++k)
    if (auto j = large.find(dets[k])) s += coefs[k] * large.amplitude_at(*j);
  return s;
}

/// <wf|H|wf> / <wf|wf> + e_core over the support of wf.
inline double energy(const SparseWavefunction& wf, const SpatialIntegrals& ints) {
  const double norm2 = wf.norm_squared();
  if (!(norm2 > 0.0)) throw DomainError("energy: wavefunction has zero norm");
  GroupedSupport support(wf.determinants(), ints.n_orb());
  std::vector<double> s(wf.size());
  sigma(support, wf.amplitudes(), ints, s);
  const auto c = wf.amplitudes();
  double num = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) num += c[k] * s[k];
  return num / norm2 + ints.e_core();
}

/// "alpha_mask,beta_mask,amplitude" rows in canonical determinant order.
inline void write_wavefunction_csv(std::ostream& out, const SparseWavefunction& wf) {
  out << "alpha_mask,beta_mask,amplitude\n" << std::setprecision(17);
  for (const auto& [d, c] : wf.canonical_entries())
    out << d.alpha << ',' << d.beta << ',' << c << '\n';
}

} // namespace sparse_ucc
