/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

/// \file amplitudes.hpp
/// Classical cluster amplitudes: MP2 first-order doubles, spin-orbital CCSD,
/// AMPJSON interchange, and the identification theta <- t used to seed UCC
/// circuits.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sparse_ucc/determinant.hpp"
#include "sparse_ucc/error.hpp"
#include "sparse_ucc/integrals.hpp"

namespace sparse_ucc {

enum class AmplitudeSource { mp2, ccsd, file, optimized };

inline const char* to_string(AmplitudeSource s) {
  switch (s) {
  case AmplitudeSource::mp2: return "mp2";
  case AmplitudeSource::ccsd: return "ccsd";
  case AmplitudeSource::file: return "file";
  case AmplitudeSource::optimized: return "optimized";
  }
  return "?";
}

/// Cluster amplitudes over blocked spin-orbital indices. t2 keys are stored
/// canonically (i<j, a<b); accessors apply the antisymmetry sign for any
/// other index order.
class AmplitudeSet {
public:
  using T1Key = std::pair<int, int>;
  using T2Key = std::array<int, 4>;

  AmplitudeSet() = default;
  AmplitudeSet(int n_orb, int n_occ, AmplitudeSource source)
      : n_orb_(n_orb), n_occ_(n_occ), source_(source) {}

  int n_orb() const noexcept { return n_orb_; }
  int n_occ() const noexcept { return n_occ_; }
  AmplitudeSource source() const noexcept { return source_; }
  void set_source(AmplitudeSource s) noexcept { source_ = s; }

  const std::map<T1Key, double>& t1_entries() const noexcept { return t1_; }
  const std::map<T2Key, double>& t2_entries() const noexcept { return t2_; }

  double t1(int i, int a) const {
    auto it = t1_.find({i, a});
    return it == t1_.end() ? 0.0 : it->second;
  }
  double t2(int i, int j, int a, int b) const {
    if (i == j || a == b) return 0.0;
    auto [key, sign] = canonical_key(i, j, a, b);
    auto it = t2_.find(key);
    return it == t2_.end() ? 0.0 : sign * it->second;
  }

  void set_t1(int i, int a, double v) {
    check_pair(i, a);
    t1_[{i, a}] = v;
  }
  /// Stores sign * v under the canonical key.
  void set_t2(int i, int j, int a, int b, double v) {
    if (i == j || a == b) throw DomainError("t2 with repeated index");
    check_pair(i, a);
    check_pair(j, b);
    auto [key, sign] = canonical_key(i, j, a, b);
    t2_[key] = sign * v;
  }

  static std::pair<T2Key, int> canonical_key(int i, int j, int a, int b) noexcept {
    int sign = 1;
    if (j < i) {
      std::swap(i, j);
      sign = -sign;
    }
    if (b < a) {
      std::swap(a, b);
      sign = -sign;
    }
    return {T2Key{i, j, a, b}, sign};
  }

  /// Is linear spin-orbital p occupied in the closed-shell reference?
  bool occupied(int p) const noexcept {
    return (p % n_orb_) < n_occ_;
  }

private:
  void check_pair(int i, int a) const {
    if (i < 0 || a < 0 || i >= 2 * n_orb_ || a >= 2 * n_orb_)
      throw RangeError("spin-orbital index outside [0, " + std::to_string(2 * n_orb_) + ")");
    if (!occupied(i) || occupied(a))
      throw RangeError("amplitude key (" + std::to_string(i) + ", " + std::to_string(a) +
                       ") is not occupied -> virtual");
  }

  int n_orb_ = 0;
  int n_occ_ = 0;
  AmplitudeSource source_ = AmplitudeSource::file;
  std::map<T1Key, double> t1_;
  std::map<T2Key, double> t2_;
};

struct Mp2Result {
  AmplitudeSet amplitudes;
  double e_corr = 0.0;
  double e_total = 0.0;
};

namespace detail {
inline void require_closed_shell(const SpatialIntegrals& ints, const char* who) {
  if (ints.ms2() != 0 || ints.n_elec() % 2 != 0)
    throw UnsupportedError(std::string(who) + " requires a closed-shell reference");
  if (ints.n_occ() >= ints.n_orb())
    throw DomainError(std::string(who) + ": no virtual orbitals");
}
} // namespace detail

/// First-order doubles t_ij^ab = <ij||ab> / (e_i + e_j - e_a - e_b).
inline Mp2Result mp2_amplitudes(const SpatialIntegrals& ints) {
  detail::require_closed_shell(ints, "mp2_amplitudes");
  const int n = ints.n_orb(), nocc = ints.n_occ();
  Mp2Result out{AmplitudeSet(n, nocc, AmplitudeSource::mp2), 0.0, 0.0};
  std::vector<SpinOrbital> occ, vir;
  for (Spin s : {Spin::alpha, Spin::beta})
    for (int p = 0; p < n; ++p) (p < nocc ? occ : vir).push_back({s, static_cast<std::uint8_t>(p)});
  double e = 0.0;
  for (std::size_t x = 0; x < occ.size(); ++x)
    for (std::size_t y = x + 1; y < occ.size(); ++y)
      for (std::size_t u = 0; u < vir.size(); ++u)
        for (std::size_t w = u + 1; w < vir.size(); ++w) {
          const auto i = occ[x], j = occ[y], a = vir[u], b = vir[w];
          const double num = so_eri(ints, i, j, a, b);
          if (num == 0.0) continue;
          const double den = ints.orbital_energy(i.spatial) + ints.orbital_energy(j.spatial) -
                             ints.orbital_energy(a.spatial) - ints.orbital_energy(b.spatial);
          if (std::abs(den) < 1e-8)
            throw DegenerateReferenceError(
                "MP2 denominator below 1e-8 for (i,j,a,b) = (" + std::to_string(i.linear(n)) +
                "," + std::to_string(j.linear(n)) + "," + std::to_string(a.linear(n)) + "," +
                std::to_string(b.linear(n)) + ")");
          const double t = num / den;
          out.amplitudes.set_t2(i.linear(n), j.linear(n), a.linear(n), b.linear(n), t);
          e += num * t;
        }
  out.e_corr = e;
  out.e_total = hf_energy(ints) + e;
  return out;
}

struct CcsdOptions {
  double tol = 1e-8;
  int max_iter = 100;
  int diis_depth = 6;
  double divergence_threshold = 1e3;
};

struct CcsdResult {
  AmplitudeSet amplitudes;
  double e_corr = 0.0;
  double e_total = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

namespace detail {

/// Dense spin-orbital CCSD machinery. Local index space: occupied spin
/// orbitals [0, o), then virtuals [o, o+v); each block alpha then beta.
class CcsdEngine {
public:
  explicit CcsdEngine(const SpatialIntegrals& ints)
      : n_orb_(ints.n_orb()), nocc_(ints.n_occ()),
        o_(2 * nocc_), v_(2 * (n_orb_ - nocc_)), n_(o_ + v_) {
    for (Spin s : {Spin::alpha, Spin::beta})
      for (int p = 0; p < nocc_; ++p) so_.push_back({s, static_cast<std::uint8_t>(p)});
    for (Spin s : {Spin::alpha, Spin::beta})
      for (int p = nocc_; p < n_orb_; ++p) so_.push_back({s, static_cast<std::uint8_t>(p)});
    const auto n = static_cast<std::size_t>(n_);
    g_.resize(n * n * n * n);
    for (int p = 0; p < n_; ++p)
      for (int q = 0; q < n_; ++q)
        for (int r = 0; r < n_; ++r)
          for (int s = 0; s < n_; ++s)
            g_[idx4(p, q, r, s)] = so_eri(ints, so_[p], so_[q], so_[r], so_[s]);
    f_.assign(n * n, 0.0);
    for (int p = 0; p < n_; ++p)
      for (int q = 0; q < n_; ++q) {
        double v = so_[p].spin == so_[q].spin ? ints.h(so_[p].spatial, so_[q].spatial) : 0.0;
        for (int m = 0; m < o_; ++m) v += G(p, m, q, m);
        f_[static_cast<std::size_t>(p) * n + q] = v;
      }
  }

  int o() const noexcept { return o_; }
  int v() const noexcept { return v_; }
  std::size_t t1_size() const noexcept { return static_cast<std::size_t>(o_) * v_; }
  std::size_t t2_size() const noexcept { return t1_size() * t1_size(); }
  std::size_t t1i(int i, int a) const noexcept { return static_cast<std::size_t>(i) * v_ + a; }
  std::size_t t2i(int i, int j, int a, int b) const noexcept {
    return ((static_cast<std::size_t>(i) * o_ + j) * v_ + a) * v_ + b;
  }
  int linear(int local) const noexcept { return so_[local].linear(n_orb_); }

  double G(int p, int q, int r, int s) const noexcept { return g_[idx4(p, q, r, s)]; }
  double F(int p, int q) const noexcept { return f_[static_cast<std::size_t>(p) * n_ + q]; }

  /// MP2 guess: t1 = f_ia / D_ia, t2 = <ij||ab> / D_ijab.
  void mp2_guess(std::vector<double>& t1, std::vector<double>& t2) const {
    t1.assign(t1_size(), 0.0);
    t2.assign(t2_size(), 0.0);
    for (int i = 0; i < o_; ++i)
      for (int a = 0; a < v_; ++a) t1[t1i(i, a)] = F(i, o_ + a) / d1(i, a);
    for (int i = 0; i < o_; ++i)
      for (int j = 0; j < o_; ++j)
        for (int a = 0; a < v_; ++a)
          for (int b = 0; b < v_; ++b)
            t2[t2i(i, j, a, b)] = G(i, j, o_ + a, o_ + b) / d2(i, j, a, b);
  }

  double d1(int i, int a) const noexcept { return F(i, i) - F(o_ + a, o_ + a); }
  double d2(int i, int j, int a, int b) const noexcept {
    return F(i, i) + F(j, j) - F(o_ + a, o_ + a) - F(o_ + b, o_ + b);
  }

  double energy(const std::vector<double>& t1, const std::vector<double>& t2) const {
    double e = 0.0;
    for (int i = 0; i < o_; ++i)
      for (int a = 0; a < v_; ++a) e += F(i, o_ + a) * t1[t1i(i, a)];
    for (int i = 0; i < o_; ++i)
      for (int j = 0; j < o_; ++j)
        for (int a = 0; a < v_; ++a)
          for (int b = 0; b < v_; ++b) {
            const double g = G(i, j, o_ + a, o_ + b);
            e += 0.25 * g * t2[t2i(i, j, a, b)] +
                 0.5 * g * t1[t1i(i, a)] * t1[t1i(j, b)];
          }
    return e;
  }

  /// Residuals R = RHS(t) - D t of the CCSD amplitude equations.
  void residual(const std::vector<double>& t1, const std::vector<double>& t2,
                std::vector<double>& r1, std::vector<double>& r2) const {
    const int o = o_, v = v_;
    auto T1 = [&](int i, int a) { return t1[t1i(i, a)]; };
    auto T2 = [&](int i, int j, int a, int b) { return t2[t2i(i, j, a, b)]; };
    auto Gv = [&](int p, int q, int r, int s) { return G(p, q, r, s); };
    // Virtual indices below are local (0..v); add o for integral lookups.
    auto tau_t = [&](int i, int j, int a, int b) {
      return T2(i, j, a, b) + 0.5 * (T1(i, a) * T1(j, b) - T1(i, b) * T1(j, a));
    };
    auto tau = [&](int i, int j, int a, int b) {
      return T2(i, j, a, b) + T1(i, a) * T1(j, b) - T1(i, b) * T1(j, a);
    };

    std::vector<double> fae(static_cast<std::size_t>(v) * v), fmi(static_cast<std::size_t>(o) * o),
        fme(static_cast<std::size_t>(o) * v);
    for (int a = 0; a < v; ++a)
      for (int e = 0; e < v; ++e) {
        double x = a == e ? 0.0 : F(o + a, o + e);
        for (int m = 0; m < o; ++m) {
          x -= 0.5 * F(m, o + e) * T1(m, a);
          for (int f = 0; f < v; ++f) {
            x += T1(m, f) * Gv(m, o + a, o + f, o + e);
            for (int n = 0; n < o; ++n)
              x -= 0.5 * tau_t(m, n, a, f) * Gv(m, n, o + e, o + f);
          }
        }
        fae[static_cast<std::size_t>(a) * v + e] = x;
      }
    for (int m = 0; m < o; ++m)
      for (int i = 0; i < o; ++i) {
        double x = m == i ? 0.0 : F(m, i);
        for (int e = 0; e < v; ++e) {
          x += 0.5 * T1(i, e) * F(m, o + e);
          for (int n = 0; n < o; ++n) {
            x += T1(n, e) * Gv(m, n, i, o + e);
            for (int f = 0; f < v; ++f)
              x += 0.5 * tau_t(i, n, e, f) * Gv(m, n, o + e, o + f);
          }
        }
        fmi[static_cast<std::size_t>(m) * o + i] = x;
      }
    for (int m = 0; m < o; ++m)
      for (int e = 0; e < v; ++e) {
        double x = F(m, o + e);
        for (int n = 0; n < o; ++n)
          for (int f = 0; f < v; ++f) x += T1(n, f) * Gv(m, n, o + e, o + f);
        fme[static_cast<std::size_t>(m) * v + e] = x;
      }
    auto Fae = [&](int a, int e) { return fae[static_cast<std::size_t>(a) * v + e]; };
    auto Fmi = [&](int m, int i) { return fmi[static_cast<std::size_t>(m) * o + i]; };
    auto Fme = [&](int m, int e) { return fme[static_cast<std::size_t>(m) * v + e]; };

    const auto oo = static_cast<std::size_t>(o) * o, vv = static_cast<std::size_t>(v) * v,
               ov = static_cast<std::size_t>(o) * v;
    std::vector<double> wmnij(oo * oo), wabef(vv * vv), wmbej(ov * ov);
    auto Wmnij = [&](int m, int n, int i, int j) -> double& {
      return wmnij[((static_cast<std::size_t>(m) * o + n) * o + i) * o + j];
    };
    auto Wabef = [&](int a, int b, int e, int f) -> double& {
      return wabef[((static_cast<std::size_t>(a) * v + b) * v + e) * v + f];
    };
    auto Wmbej = [&](int m, int b, int e, int j) -> double& {
      return wmbej[((static_cast<std::size_t>(m) * v + b) * v + e) * o + j];
    };
    for (int m = 0; m < o; ++m)
      for (int n = 0; n < o; ++n)
        for (int i = 0; i < o; ++i)
          for (int j = 0; j < o; ++j) {
            double x = Gv(m, n, i, j);
            for (int e = 0; e < v; ++e) {
              x += T1(j, e) * Gv(m, n, i, o + e) - T1(i, e) * Gv(m, n, j, o + e);
              for (int f = 0; f < v; ++f) x += 0.25 * tau(i, j, e, f) * Gv(m, n, o + e, o + f);
            }
            Wmnij(m, n, i, j) = x;
          }
    for (int a = 0; a < v; ++a)
      for (int b = 0; b < v; ++b)
        for (int e = 0; e < v; ++e)
          for (int f = 0; f < v; ++f) {
            double x = Gv(o + a, o + b, o + e, o + f);
            for (int m = 0; m < o; ++m) {
              x -= T1(m, b) * Gv(o + a, m, o + e, o + f) - T1(m, a) * Gv(o + b, m, o + e, o + f);
              for (int n = 0; n < o; ++n) x += 0.25 * tau(m, n, a, b) * Gv(m, n, o + e, o + f);
            }
            Wabef(a, b, e, f) = x;
          }
    for (int m = 0; m < o; ++m)
      for (int b = 0; b < v; ++b)
        for (int e = 0; e < v; ++e)
          for (int j = 0; j < o; ++j) {
            double x = Gv(m, o + b, o + e, j);
            for (int f = 0; f < v; ++f) x += T1(j, f) * Gv(m, o + b, o + e, o + f);
            for (int n = 0; n < o; ++n) {
              x -= T1(n, b) * Gv(m, n, o + e, j);
              for (int f = 0; f < v; ++f)
                x -= (0.5 * T2(j, n, f, b) + T1(j, f) * T1(n, b)) * Gv(m, n, o + e, o + f);
            }
            Wmbej(m, b, e, j) = x;
          }

    r1.assign(t1_size(), 0.0);
    for (int i = 0; i < o; ++i)
      for (int a = 0; a < v; ++a) {
        double x = F(i, o + a);
        for (int e = 0; e < v; ++e) x += T1(i, e) * Fae(a, e);
        for (int m = 0; m < o; ++m) x -= T1(m, a) * Fmi(m, i);
        for (int m = 0; m < o; ++m)
          for (int e = 0; e < v; ++e) {
            x += T2(i, m, a, e) * Fme(m, e);
            for (int f = 0; f < v; ++f) x -= 0.5 * T2(i, m, e, f) * Gv(m, o + a, o + e, o + f);
            for (int n = 0; n < o; ++n) x -= 0.5 * T2(m, n, a, e) * Gv(n, m, o + e, i);
          }
        for (int n = 0; n < o; ++n)
          for (int f = 0; f < v; ++f) x -= T1(n, f) * Gv(n, o + a, i, o + f);
        r1[t1i(i, a)] = x - d1(i, a) * T1(i, a);
      }

    // Contracted one-body pieces for the T2 equation.
    std::vector<double> xbe(vv), xmj(oo);
    for (int b = 0; b < v; ++b)
      for (int e = 0; e < v; ++e) {
        double x = Fae(b, e);
        for (int m = 0; m < o; ++m) x -= 0.5 * T1(m, b) * Fme(m, e);
        xbe[static_cast<std::size_t>(b) * v + e] = x;
      }
    for (int m = 0; m < o; ++m)
      for (int j = 0; j < o; ++j) {
        double x = Fmi(m, j);
        for (int e = 0; e < v; ++e) x += 0.5 * T1(j, e) * Fme(m, e);
        xmj[static_cast<std::size_t>(m) * o + j] = x;
      }
    auto Xbe = [&](int b, int e) { return xbe[static_cast<std::size_t>(b) * v + e]; };
    auto Xmj = [&](int m, int j) { return xmj[static_cast<std::size_t>(m) * o + j]; };

    // Z(i,j,a,b) = sum_me [t_im^ae W_mbej - t_i^e t_m^a <mb||ej>], to be
    // antisymmetrized with P(ij)P(ab).
    std::vector<double> z(t2_size());
    for (int i = 0; i < o; ++i)
      for (int j = 0; j < o; ++j)
        for (int a = 0; a < v; ++a)
          for (int b = 0; b < v; ++b) {
            double x = 0.0;
            for (int m = 0; m < o; ++m)
              for (int e = 0; e < v; ++e)
                x += T2(i, m, a, e) * Wmbej(m, b, e, j) -
                     T1(i, e) * T1(m, a) * Gv(m, o + b, o + e, j);
            z[t2i(i, j, a, b)] = x;
          }

    r2.assign(t2_size(), 0.0);
    for (int i = 0; i < o; ++i)
      for (int j = 0; j < o; ++j)
        for (int a = 0; a < v; ++a)
          for (int b = 0; b < v; ++b) {
            double x = Gv(i, j, o + a, o + b);
            for (int e = 0; e < v; ++e) {
              x += T2(i, j, a, e) * Xbe(b, e) - T2(i, j, b, e) * Xbe(a, e);
              x += T1(i, e) * Gv(o + a, o + b, o + e, j) - T1(j, e) * Gv(o + a, o + b, o + e, i);
            }
            for (int m = 0; m < o; ++m) {
              x -= T2(i, m, a, b) * Xmj(m, j) - T2(j, m, a, b) * Xmj(m, i);
              x -= T1(m, a) * Gv(m, o + b, i, j) - T1(m, b) * Gv(m, o + a, i, j);
              for (int n = 0; n < o; ++n) x += 0.5 * tau(m, n, a, b) * Wmnij(m, n, i, j);
            }
            for (int e = 0; e < v; ++e)
              for (int f = 0; f < v; ++f) x += 0.5 * tau(i, j, e, f) * Wabef(a, b, e, f);
            x += z[t2i(i, j, a, b)] - z[t2i(j, i, a, b)] - z[t2i(i, j, b, a)] + z[t2i(j, i, b, a)];
            r2[t2i(i, j, a, b)] = x - d2(i, j, a, b) * T2(i, j, a, b);
          }
  }

  AmplitudeSet to_set(const std::vector<double>& t1, const std::vector<double>& t2,
                      AmplitudeSource source) const {
    AmplitudeSet s(n_orb_, nocc_, source);
    for (int i = 0; i < o_; ++i)
      for (int a = 0; a < v_; ++a) {
        const double x = t1[t1i(i, a)];
        if (x != 0.0) s.set_t1(linear(i), linear(o_ + a), x);
      }
    for (int i = 0; i < o_; ++i)
      for (int j = i + 1; j < o_; ++j)
        for (int a = 0; a < v_; ++a)
          for (int b = a + 1; b < v_; ++b) {
            const double x = t2[t2i(i, j, a, b)];
            if (x != 0.0) s.set_t2(linear(i), linear(j), linear(o_ + a), linear(o_ + b), x);
          }
    return s;
  }

  void from_set(const AmplitudeSet& s, std::vector<double>& t1, std::vector<double>& t2) const {
    t1.assign(t1_size(), 0.0);
    t2.assign(t2_size(), 0.0);
    for (int i = 0; i < o_; ++i)
      for (int a = 0; a < v_; ++a) t1[t1i(i, a)] = s.t1(linear(i), linear(o_ + a));
    for (int i = 0; i < o_; ++i)
      for (int j = 0; j < o_; ++j)
        for (int a = 0; a < v_; ++a)
          for (int b = 0; b < v_; ++b)
            t2[t2i(i, j, a, b)] = s.t2(linear(i), linear(j), linear(o_ + a), linear(o_ + b));
  }

private:
  std::size_t idx4(int p, int q, int r, int s) const noexcept {
    const auto n = static_cast<std::size_t>(n_);
    return ((p * n + q) * n + r) * n + s;
  }

  int n_orb_, nocc_, o_, v_, n_;
  std::vector<SpinOrbital> so_;
  std::vector<double> g_;
  std::vector<double> f_;
};

inline double max_abs(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  for (double x : b) m = std::max(m, std::abs(x));
  return m;
}

} // namespace detail

/// Infinity norm of the CCSD residual at the given amplitudes. Evaluated
/// independently of the solver loop.
inline double ccsd_residual_norm(const SpatialIntegrals& ints, const AmplitudeSet& amps) {
  detail::require_closed_shell(ints, "ccsd_residual_norm");
  detail::CcsdEngine eng(ints);
  std::vector<double> t1, t2, r1, r2;
  eng.from_set(amps, t1, t2);
  eng.residual(t1, t2, r1, r2);
  return detail::max_abs(r1, r2);
}

/// Iterative spin-orbital CCSD from the MP2 guess with DIIS acceleration.
inline CcsdResult ccsd_solve(const SpatialIntegrals& ints, const CcsdOptions& opt = {}) {
  detail::require_closed_shell(ints, "ccsd_solve");
  detail::CcsdEngine eng(ints);
  std::vector<double> t1, t2, r1, r2;
  eng.mp2_guess(t1, t2);
  const std::size_t n1 = t1.size(), n2 = t2.size();

  std::vector<Eigen::VectorXd> hist_t, hist_e;
  double res = 0.0;
  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    eng.residual(t1, t2, r1, r2);
    res = detail::max_abs(r1, r2);
    if (!std::isfinite(res) || res > opt.divergence_threshold)
      throw ConvergenceError("CCSD diverged (residual " + std::to_string(res) + ")", res, iter);
    if (res < opt.tol) {
      CcsdResult out;
      out.amplitudes = eng.to_set(t1, t2, AmplitudeSource::ccsd);
      out.e_corr = eng.energy(t1, t2);
      out.e_total = hf_energy(ints) + out.e_corr;
      out.iterations = iter;
      out.residual = res;
      return out;
    }
    // Jacobi update t <- t + R / D, then DIIS over (t, delta t).
    Eigen::VectorXd tn(n1 + n2), err(n1 + n2);
    for (int i = 0; i < eng.o(); ++i)
      for (int a = 0; a < eng.v(); ++a) {
        auto k = eng.t1i(i, a);
        err[k] = r1[k] / eng.d1(i, a);
        tn[k] = t1[k] + err[k];
      }
    for (int i = 0; i < eng.o(); ++i)
      for (int j = 0; j < eng.o(); ++j)
        for (int a = 0; a < eng.v(); ++a)
          for (int b = 0; b < eng.v(); ++b) {
            auto k = eng.t2i(i, j, a, b);
            err[n1 + k] = r2[k] / eng.d2(i, j, a, b);
            tn[n1 + k] = t2[k] + err[n1 + k];
          }
    if (opt.diis_depth > 0) {
      hist_t.push_back(tn);
      hist_e.push_back(err);
      if (static_cast<int>(hist_t.size()) > opt.diis_depth) {
        hist_t.erase(hist_t.begin());
        hist_e.erase(hist_e.begin());
      }
      const auto m = static_cast<Eigen::Index>(hist_t.size());
      if (m >= 2) {
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m + 1, m + 1);
        for (Eigen::Index x = 0; x < m; ++x)
          for (Eigen::Index y = 0; y <= x; ++y)
            B(x, y) = B(y, x) = hist_e[x].dot(hist_e[y]);
        B.row(m).head(m).setConstant(-1.0);
        B.col(m).head(m).setConstant(-1.0);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
        rhs[m] = -1.0;
        Eigen::VectorXd c = B.colPivHouseholderQr().solve(rhs);
        if (c.allFinite()) {
          tn.setZero();
          for (Eigen::Index x = 0; x < m; ++x) tn += c[x] * hist_t[x];
        }
      }
    }
    for (std::size_t k = 0; k < n1; ++k) t1[k] = tn[static_cast<Eigen::Index>(k)];
    for (std::size_t k = 0; k < n2; ++k) t2[k] = tn[static_cast<Eigen::Index>(n1 + k)];
  }
  throw ConvergenceError("CCSD did not converge in " + std::to_string(opt.max_iter) +
                             " iterations (residual " + std::to_string(res) + ")",
                         res, opt.max_iter);
}

/// theta for each pool operator: the t1/t2 value for its index order, or 0
/// when the set has no entry.
inline std::vector<double> amplitudes_to_parameters(const AmplitudeSet& amps,
                                                    std::span<const ExcitationOp> pool) {
  std::vector<double> theta;
  theta.reserve(pool.size());
  const int n = amps.n_orb();
  for (const auto& op : pool) {
    auto check = [&](SpinOrbital p, bool want_occ) {
      if (p.spatial >= n || amps.occupied(p.linear(n)) != want_occ)
        throw MappingError("operator index " + std::to_string(p.linear(n)) +
                           " outside the amplitude window");
      return p.linear(n);
    };
    auto ann = op.annihilate();
    auto cre = op.create();
    if (op.rank() == 1) {
      theta.push_back(amps.t1(check(ann[0], true), check(cre[0], false)));
    } else {
      theta.push_back(amps.t2(check(ann[0], true), check(ann[1], true), check(cre[0], false),
                              check(cre[1], false)));
    }
  }
  return theta;
}

/// AMPJSON: {"n_orb", "n_occ", "convention": "blocked-spin", "t1": [[i,a,v]...],
/// "t2": [[i,j,a,b,v]...]}, 0-based blocked spin-orbital indices.
inline nlohmann::json amplitudes_to_json(const AmplitudeSet& amps) {
  nlohmann::json j;
  j["n_orb"] = amps.n_orb();
  j["n_occ"] = amps.n_occ();
  j["convention"] = "blocked-spin";
  j["source"] = to_string(amps.source());
  auto t1 = nlohmann::json::array();
  for (const auto& [k, v] : amps.t1_entries()) t1.push_back({k.first, k.second, v});
  auto t2 = nlohmann::json::array();
  for (const auto& [k, v] : amps.t2_entries()) t2.push_back({k[0], k[1], k[2], k[3], v});
  j["t1"] = std::move(t1);
  j["t2"] = std::move(t2);
  return j;
}

inline AmplitudeSet amplitudes_from_json(const nlohmann::json& j) {
  auto need_int = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer())
      throw ParseError(std::string("AMPJSON: missing integer field '") + key + "'");
    return j[key].get<int>();
  };
  if (!j.is_object()) throw ParseError("AMPJSON: top level must be an object");
  const int n_orb = need_int("n_orb"), n_occ = need_int("n_occ");
  if (n_orb <= 0 || n_occ < 0 || n_occ > n_orb) throw ParseError("AMPJSON: bad n_orb/n_occ");
  if (j.contains("convention") && j["convention"] != "blocked-spin")
    throw ParseError("AMPJSON: unsupported convention " + j["convention"].dump());
  AmplitudeSet s(n_orb, n_occ, AmplitudeSource::file);
  auto records = [&](const char* key, std::size_t width, auto&& store) {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) throw ParseError(std::string("AMPJSON: '") + key + "' must be an array");
    std::size_t rec = 0;
    for (const auto& r : j[key]) {
      ++rec;
      auto where = std::string("AMPJSON ") + key + " record " + std::to_string(rec);
      if (!r.is_array() || r.size() != width) throw ParseError(where + ": wrong arity");
      std::array<int, 4> idx{};
      for (std::size_t k = 0; k + 1 < width; ++k) {
        if (!r[k].is_number_integer()) throw ParseError(where + ": non-integer index");
        idx[k] = r[k].get<int>();
      }
      if (!r[width - 1].is_number()) throw ParseError(where + ": non-numeric value");
      try {
        store(idx, r[width - 1].get<double>(), where);
      } catch (const RangeError& e) {
        throw ParseError(where + ": " + e.what());
      }
    }
  };
  records("t1", 3, [&](const std::array<int, 4>& k, double v, const std::string& where) {
    if (s.t1_entries().count({k[0], k[1]}) && s.t1(k[0], k[1]) != v)
      throw IntegrityError(where + ": conflicting duplicate");
    s.set_t1(k[0], k[1], v);
  });
  records("t2", 5, [&](const std::array<int, 4>& k, double v, const std::string& where) {
    if (k[0] == k[1] || k[2] == k[3]) throw ParseError(where + ": repeated index");
    auto [key, sign] = AmplitudeSet::canonical_key(k[0], k[1], k[2], k[3]);
    if (s.t2_entries().count(key) && s.t2_entries().at(key) != sign * v)
      throw IntegrityError(where + ": conflicting duplicate");
    s.set_t2(k[0], k[1], k[2], k[3], v);
  });
  return s;
}

inline void write_amplitudes(const AmplitudeSet& amps, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << std::setprecision(17) << amplitudes_to_json(amps).dump() << '\n';
}

inline AmplitudeSet read_amplitudes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("AMPJSON: ") + e.what());
  }
  return amplitudes_from_json(j);
}

} // namespace sparse_ucc
