/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

/// \file circuit.hpp
/// Factorized UCCSD circuits: operator pool, factor ordering, and the
/// per-factor rotation with support truncation.
///
/// Each factor exp(theta (A - A^dagger)) acts on a determinant pair
/// (D, D' = s A D) as a plane rotation:
///   c_D  <- cos(theta) c_D  - s sin(theta) c_D'
///   c_D' <- cos(theta) c_D' + s sin(theta) c_D
/// and leaves every other determinant alone.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparse_ucc/amplitudes.hpp"
#include "sparse_ucc/determinant.hpp"
#include "sparse_ucc/error.hpp"
#include "sparse_ucc/integrals.hpp"
#include "sparse_ucc/symmetry.hpp"
#include "sparse_ucc/wavefunction.hpp"

namespace sparse_ucc {

/// exp(theta (op - op^dagger)).
struct UccFactor {
  ExcitationOp op;
  double theta = 0.0;
};

/// Retain every determinant.
inline constexpr std::size_t unlimited_nwf = std::numeric_limits<std::size_t>::max();

struct CircuitSpec {
  std::vector<UccFactor> factors; // application order: factors[0] acts first
  std::size_t n_wf = unlimited_nwf;
  bool include_singles = true;
  std::optional<std::size_t> max_doubles;

  void validate() const {
    if (n_wf == 0) throw ConfigError("n_wf must be at least 1");
    std::size_t doubles = 0;
    for (const auto& f : factors) {
      if (f.op.rank() == 1 && !include_singles)
        throw ConfigError("singles factor present although include_singles is false");
      doubles += f.op.rank() == 2;
    }
    if (max_doubles && doubles > *max_doubles)
      throw ConfigError("circuit has " + std::to_string(doubles) + " doubles, cap is " +
                        std::to_string(*max_doubles));
  }
};

struct PoolOptions {
  int n_occ = 0; // doubly occupied spatial orbitals
  int n_orb = 0;
  bool include_singles = true;
  std::optional<std::vector<int>> orb_sym;
  std::optional<std::size_t> max_doubles;
};

/// All spin-conserving singles and doubles from the closed-shell reference,
/// one canonical operator per equivalence class, sorted canonically. When
/// the doubles cap binds, the doubles with the largest |t2| in `rank` survive.
inline std::vector<ExcitationOp> build_pool(const PoolOptions& opt,
                                            const AmplitudeSet* rank = nullptr) {
  if (opt.n_occ <= 0 || opt.n_occ >= opt.n_orb || opt.n_orb > 64)
    throw DomainError("build_pool: need 0 < n_occ < n_orb <= 64");
  std::vector<ExcitationOp> singles, doubles;
  const int no = opt.n_occ, n = opt.n_orb;
  if (opt.include_singles)
    for (Spin s : {Spin::alpha, Spin::beta})
      for (int i = 0; i < no; ++i)
        for (int a = no; a < n; ++a)
          singles.push_back(ExcitationOp::single({s, std::uint8_t(i)}, {s, std::uint8_t(a)}));
  for (Spin s : {Spin::alpha, Spin::beta})
    for (int i = 0; i < no; ++i)
      for (int j = i + 1; j < no; ++j)
        for (int a = no; a < n; ++a)
          for (int b = a + 1; b < n; ++b)
            doubles.push_back(ExcitationOp::double_({s, std::uint8_t(i)}, {s, std::uint8_t(j)},
                                                    {s, std::uint8_t(a)}, {s, std::uint8_t(b)}));
  for (int i = 0; i < no; ++i)
    for (int j = 0; j < no; ++j)
      for (int a = no; a < n; ++a)
        for (int b = no; b < n; ++b)
          doubles.push_back(ExcitationOp::double_(alpha(i), beta(j), alpha(a), beta(b)));

  if (opt.orb_sym) {
    singles = point_group_filter(singles, *opt.orb_sym);
    doubles = point_group_filter(doubles, *opt.orb_sym);
  }
  if (opt.max_doubles && doubles.size() > *opt.max_doubles) {
    if (!rank)
      throw ConfigError("doubles cap " + std::to_string(*opt.max_doubles) +
                        " binds but no amplitudes were supplied to rank the doubles");
    std::vector<std::pair<double, ExcitationOp>> ranked;
    ranked.reserve(doubles.size());
    auto theta = amplitudes_to_parameters(*rank, doubles);
    for (std::size_t k = 0; k < doubles.size(); ++k)
      ranked.emplace_back(std::abs(theta[k]), doubles[k]);
    std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return x.second < y.second;
    });
    ranked.resize(*opt.max_doubles);
    doubles.clear();
    for (auto& r : ranked) doubles.push_back(r.second);
  }
  std::vector<ExcitationOp> pool = std::move(singles);
  pool.insert(pool.end(), doubles.begin(), doubles.end());
  std::sort(pool.begin(), pool.end());
  return pool;
}

inline std::vector<UccFactor> make_factors(std::span<const ExcitationOp> pool,
                                           std::span<const double> theta) {
  if (pool.size() != theta.size())
    throw DomainError("make_factors: pool and parameter sizes differ");
  std::vector<UccFactor> f(pool.size());
  for (std::size_t k = 0; k < pool.size(); ++k) f[k] = {pool[k], theta[k]};
  return f;
}

enum class OrderingScheme { magnitude, random, as_given };

struct Ordering {
  OrderingScheme scheme = OrderingScheme::magnitude;
  std::uint64_t seed = 0;

  static Ordering magnitude() { return {OrderingScheme::magnitude, 0}; }
  static Ordering random(std::uint64_t seed) { return {OrderingScheme::random, seed}; }
  static Ordering as_given() { return {OrderingScheme::as_given, 0}; }
};

/// Uniform integer in [0, n) from a 64-bit engine, by rejection. Portable
/// across standard libraries, unlike std::uniform_int_distribution.
inline std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

/// Derive an independent seed for subtask `index` (splitmix64 finalizer).
inline std::uint64_t fan_out_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Permutation of [0, n) giving the application order.
inline std::vector<std::size_t> ordering_permutation(std::span<const UccFactor> factors,
                                                     const Ordering& ordering) {
  std::vector<std::size_t> perm(factors.size());
  for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
  switch (ordering.scheme) {
  case OrderingScheme::as_given: break;
  case OrderingScheme::magnitude:
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t x, std::size_t y) {
      const double mx = std::abs(factors[x].theta), my = std::abs(factors[y].theta);
      if (mx != my) return mx > my;
      return factors[x].op < factors[y].op;
    });
    break;
  case OrderingScheme::random: {
    std::mt19937_64 rng(ordering.seed);
    for (std::size_t k = perm.size(); k > 1; --k)
      std::swap(perm[k - 1], perm[bounded_draw(rng, k)]);
    break;
  }
  }
  return perm;
}

/// Factors rearranged into application order (position 0 acts first).
inline std::vector<UccFactor> order_factors(std::span<const UccFactor> factors,
                                            const Ordering& ordering) {
  auto perm = ordering_permutation(factors, ordering);
  std::vector<UccFactor> out;
  out.reserve(factors.size());
  for (auto k : perm) out.push_back(factors[k]);
  return out;
}

/// Apply one factor in place. Pairs are gathered before any amplitude
/// changes so each (D, D') pair rotates exactly once.
inline void apply_factor_inplace(SparseWavefunction& wf, const UccFactor& f) {
  if (f.theta == 0.0 || wf.empty()) return;
  const ExcitationOp& op = f.op;
  const ExcitationOp conj = op.conjugate();
  const OrbitalMask ia = op.annihilate_mask(Spin::alpha), ib = op.annihilate_mask(Spin::beta);
  const OrbitalMask ca = op.create_mask(Spin::alpha), cb = op.create_mask(Spin::beta);

  struct Pair {
    std::size_t lo, hi;
    int phase;
  };
  std::vector<Pair> pairs;
  const std::size_t n0 = wf.size();
  for (std::size_t k = 0; k < n0; ++k) {
    const Determinant d = wf.determinants()[k];
    if ((d.alpha & ia) == ia && (d.beta & ib) == ib && !(d.alpha & ca) && !(d.beta & cb)) {
      const auto ex = apply_excitation(d, op);
      pairs.push_back({k, wf.find_or_insert_zero(ex->det), ex->phase});
    } else if ((d.alpha & ca) == ca && (d.beta & cb) == cb && !(d.alpha & ia) && !(d.beta & ib)) {
      const auto ex = apply_excitation(d, conj);
      if (wf.find(ex->det)) continue; // rotated from the other side
      pairs.push_back({wf.find_or_insert_zero(ex->det), k, ex->phase});
    }
  }
  const double c = std::cos(f.theta), s = std::sin(f.theta);
  std::vector<std::size_t> touched;
  touched.reserve(2 * pairs.size());
  for (const auto& p : pairs) {
    const double x = wf.amplitude_at(p.lo), y = wf.amplitude_at(p.hi);
    wf.amplitude_at(p.lo) = c * x - p.phase * s * y;
    wf.amplitude_at(p.hi) = c * y + p.phase * s * x;
    touched.push_back(p.lo);
    touched.push_back(p.hi);
  }
  wf.prune_zeros(std::move(touched));
}

inline SparseWavefunction apply_factor(SparseWavefunction wf, const UccFactor& f) {
  apply_factor_inplace(wf, f);
  return wf;
}

struct CircuitResult {
  SparseWavefunction wavefunction;
  double energy = 0.0;
  std::size_t peak_support = 0; // largest support seen before any truncation
  bool truncated = false;
};

/// Apply the factors in order to the unit reference determinant, truncating
/// to n_wf whenever the support exceeds it, then evaluate the energy.
inline CircuitResult run_circuit(const Determinant& reference, const CircuitSpec& spec,
                                 const SpatialIntegrals& ints) {
  spec.validate();
  CircuitResult r;
  r.wavefunction = SparseWavefunction(reference, 1.0);
  r.peak_support = 1;
  for (const auto& f : spec.factors) {
    apply_factor_inplace(r.wavefunction, f);
    r.peak_support = std::max(r.peak_support, r.wavefunction.size());
    if (r.wavefunction.size() > spec.n_wf) {
      r.wavefunction.truncate_to(spec.n_wf);
      r.truncated = true;
    }
  }
  r.energy = energy(r.wavefunction, ints);
  return r;
}

/// Closed-shell reference determinant for these integrals.
inline Determinant reference_determinant(const SpatialIntegrals& ints) {
  return hartree_fock_det(ints.n_occ(), ints.n_occ(), ints.n_orb());
}

/// [{rank, annihilate, create, theta}] in application order, blocked
/// spin-orbital indices.
inline nlohmann::json circuit_to_json(std::span<const UccFactor> factors, int n_orb) {
  auto out = nlohmann::json::array();
  for (const auto& f : factors) {
    nlohmann::json j;
    j["rank"] = f.op.rank();
    j["annihilate"] = nlohmann::json::array();
    j["create"] = nlohmann::json::array();
    for (auto p : f.op.annihilate()) j["annihilate"].push_back(p.linear(n_orb));
    for (auto p : f.op.create()) j["create"].push_back(p.linear(n_orb));
    j["theta"] = f.theta;
    out.push_back(std::move(j));
  }
  return out;
}

inline std::vector<UccFactor> circuit_from_json(const nlohmann::json& j, int n_orb) {
  if (!j.is_array()) throw ParseError("circuit JSON must be an array");
  std::vector<UccFactor> out;
  std::size_t rec = 0;
  for (const auto& e : j) {
    ++rec;
    try {
      const int rank = e.at("rank").get<int>();
      const auto& a = e.at("annihilate");
      const auto& c = e.at("create");
      if ((rank != 1 && rank != 2) || a.size() != static_cast<std::size_t>(rank) ||
          c.size() != static_cast<std::size_t>(rank))
        throw ParseError("bad rank");
      auto so = [&](const nlohmann::json& x) { return SpinOrbital::from_linear(x.get<int>(), n_orb); };
      ExcitationOp op = rank == 1 ? ExcitationOp::single(so(a[0]), so(c[0]))
                                  : ExcitationOp::double_(so(a[0]), so(a[1]), so(c[0]), so(c[1]));
      out.push_back({op, e.at("theta").get<double>()});
    } catch (const std::exception& ex) {
      throw ParseError("circuit JSON record " + std::to_string(rec) + ": " + ex.what());
    }
  }
  return out;
}

} // namespace sparse_ucc
