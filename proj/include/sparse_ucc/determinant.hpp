/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

/// \file determinant.hpp
/// Bitmask Slater determinants, excitation operators with fermionic phases,
/// and Slater-Condon matrix elements.
///
/// Phase convention: an elementary creation or annihilation on spin orbital p
/// contributes (-1)^(number of occupied spin orbitals whose blocked index is
/// below p). Excitations a+_a a+_b a_j a_i are applied right to left.

#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "sparse_ucc/error.hpp"
#include "sparse_ucc/integrals.hpp"

namespace sparse_ucc {

using OrbitalMask = std::uint64_t;

constexpr OrbitalMask bit(int p) noexcept { return OrbitalMask{1} << p; }

constexpr OrbitalMask low_bits(int n) noexcept {
  return n >= 64 ? ~OrbitalMask{0} : (OrbitalMask{1} << n) - 1;
}

/// Call f(p) for every set bit, ascending.
template <typename F> constexpr void for_each_bit(OrbitalMask m, F&& f) {
  while (m) {
    f(std::countr_zero(m));
    m &= m - 1;
  }
}

/// Occupation bitmasks for the alpha and beta spin orbitals. Totally ordered
/// lexicographically on (alpha, beta) as unsigned integers.
struct Determinant {
  OrbitalMask alpha = 0;
  OrbitalMask beta = 0;

  constexpr auto operator<=>(const Determinant&) const = default;

  constexpr bool occupied(SpinOrbital p) const noexcept {
    return (mask(p.spin) & bit(p.spatial)) != 0;
  }
  constexpr OrbitalMask mask(Spin s) const noexcept {
    return s == Spin::alpha ? alpha : beta;
  }
  constexpr int n_alpha() const noexcept { return std::popcount(alpha); }
  constexpr int n_beta() const noexcept { return std::popcount(beta); }
  constexpr int n_elec() const noexcept { return n_alpha() + n_beta(); }
};

struct DeterminantHash {
  std::size_t operator()(const Determinant& d) const noexcept {
    std::uint64_t x = d.alpha * 0x9E3779B97F4A7C15ull ^ std::rotl(d.beta, 31);
    x ^= x >> 33;
    x *= 0xFF51AFD7ED558CCDull;
    x ^= x >> 33;
    x *= 0xC4CEB9FE1A85EC53ull;
    x ^= x >> 33;
    return static_cast<std::size_t>(x);
  }
};

/// "α:{0,1}|β:{0}" with ascending spatial indices.
inline std::string to_string(const Determinant& d) {
  auto list = [](OrbitalMask m) {
    std::string s = "{";
    bool first = true;
    for_each_bit(m, [&](int p) {
      if (!first) s += ',';
      s += std::to_string(p);
      first = false;
    });
    return s + "}";
  };
  return "\xCE\xB1:" + list(d.alpha) + "|\xCE\xB2:" + list(d.beta);
}

/// Closed- or open-shell aufbau determinant.
inline Determinant hartree_fock_det(int n_alpha, int n_beta, int n_orb) {
  if (n_orb < 0 || n_orb > 64)
    throw RangeError("orbital count " + std::to_string(n_orb) + " outside [0, 64]");
  if (n_alpha < 0 || n_beta < 0 || n_alpha > n_orb || n_beta > n_orb)
    throw RangeError("electron counts (" + std::to_string(n_alpha) + ", " +
                     std::to_string(n_beta) + ") exceed " + std::to_string(n_orb) +
                     " orbitals");
  return {low_bits(n_alpha), low_bits(n_beta)};
}

/// Single (a+_a a_i) or double (a+_a a+_b a_j a_i) excitation with
/// annihilate = {i, j} and create = {a, b}.
class ExcitationOp {
public:
  constexpr ExcitationOp() = default;

  static ExcitationOp single(SpinOrbital i, SpinOrbital a) {
    ExcitationOp op;
    op.rank_ = 1;
    op.annihilate_ = {i, SpinOrbital{}};
    op.create_ = {a, SpinOrbital{}};
    op.validate();
    return op;
  }
  static ExcitationOp double_(SpinOrbital i, SpinOrbital j, SpinOrbital a,
                              SpinOrbital b) {
    ExcitationOp op;
    op.rank_ = 2;
    op.annihilate_ = {i, j};
    op.create_ = {a, b};
    op.validate();
    return op;
  }

  constexpr int rank() const noexcept { return rank_; }
  std::span<const SpinOrbital> annihilate() const noexcept {
    return {annihilate_.data(), static_cast<std::size_t>(rank_)};
  }
  std::span<const SpinOrbital> create() const noexcept {
    return {create_.data(), static_cast<std::size_t>(rank_)};
  }

  /// The deexcitation (create and annihilate lists swapped).
  ExcitationOp conjugate() const noexcept {
    ExcitationOp op = *this;
    std::swap(op.annihilate_, op.create_);
    return op;
  }

  /// Equivalent operator with each index list ascending, plus the sign
  /// relating the two: this == sign * canonical.
  std::pair<ExcitationOp, int> canonical() const noexcept {
    ExcitationOp op = *this;
    int sign = 1;
    if (rank_ == 2) {
      if (op.annihilate_[1] < op.annihilate_[0]) {
        std::swap(op.annihilate_[0], op.annihilate_[1]);
        sign = -sign;
      }
      if (op.create_[1] < op.create_[0]) {
        std::swap(op.create_[0], op.create_[1]);
        sign = -sign;
      }
    }
    return {op, sign};
  }
  bool is_canonical() const noexcept { return canonical().first == *this; }

  /// Spin-flipped partner (spatial indices kept).
  ExcitationOp spin_mirror() const noexcept {
    ExcitationOp op = *this;
    for (int k = 0; k < rank_; ++k) {
      op.annihilate_[k].spin = flip(op.annihilate_[k].spin);
      op.create_[k].spin = flip(op.create_[k].spin);
    }
    return op;
  }

  OrbitalMask annihilate_mask(Spin s) const noexcept { return mask_of(annihilate_, s); }
  OrbitalMask create_mask(Spin s) const noexcept { return mask_of(create_, s); }

  constexpr auto operator<=>(const ExcitationOp&) const = default;

private:
  OrbitalMask mask_of(const std::array<SpinOrbital, 2>& l, Spin s) const noexcept {
    OrbitalMask m = 0;
    for (int k = 0; k < rank_; ++k)
      if (l[k].spin == s) m |= bit(l[k].spatial);
    return m;
  }
  void validate() const {
    auto a = annihilate(), c = create();
    for (auto p : a)
      if (p.spatial >= 64) throw RangeError("spatial index exceeds 63");
    for (auto p : c)
      if (p.spatial >= 64) throw RangeError("spatial index exceeds 63");
    if (rank_ == 2 && (a[0] == a[1] || c[0] == c[1]))
      throw DomainError("repeated index in excitation operator");
    for (auto p : a)
      for (auto q : c)
        if (p == q) throw DomainError("create and annihilate lists overlap");
    int na = 0, nc = 0;
    for (auto p : a) na += p.spin == Spin::alpha;
    for (auto p : c) nc += p.spin == Spin::alpha;
    if (na != nc) throw DomainError("excitation does not conserve S_z");
  }

  std::uint8_t rank_ = 0;
  std::array<SpinOrbital, 2> annihilate_{};
  std::array<SpinOrbital, 2> create_{};
};

/// Parity contributed by an elementary operator on p acting on d.
constexpr int elementary_parity(const Determinant& d, SpinOrbital p) noexcept {
  const OrbitalMask below = bit(p.spatial) - 1;
  return p.spin == Spin::alpha
             ? std::popcount(d.alpha & below) & 1
             : (std::popcount(d.alpha) + std::popcount(d.beta & below)) & 1;
}

struct Excited {
  Determinant det;
  int phase = 1;
};

namespace detail {
constexpr void toggle(Determinant& d, SpinOrbital p) noexcept {
  (p.spin == Spin::alpha ? d.alpha : d.beta) ^= bit(p.spatial);
}
} // namespace detail

/// Apply op to d. Returns std::nullopt when an annihilated orbital is empty
/// or a created orbital is already occupied.
inline std::optional<Excited> apply_excitation(const Determinant& d,
                                               const ExcitationOp& op) noexcept {
  Determinant out = d;
  int parity = 0;
  auto ann = op.annihilate();
  for (std::size_t k = 0; k < ann.size(); ++k) {
    if (!out.occupied(ann[k])) return std::nullopt;
    parity ^= elementary_parity(out, ann[k]);
    detail::toggle(out, ann[k]);
  }
  auto cre = op.create();
  for (std::size_t k = cre.size(); k-- > 0;) {
    if (out.occupied(cre[k])) return std::nullopt;
    parity ^= elementary_parity(out, cre[k]);
    detail::toggle(out, cre[k]);
  }
  return Excited{out, parity ? -1 : 1};
}

inline int excitation_degree(const Determinant& d1, const Determinant& d2) {
  if (d1.n_elec() != d2.n_elec())
    throw DomainError("excitation_degree: unequal electron counts");
  return (std::popcount(d1.alpha ^ d2.alpha) + std::popcount(d1.beta ^ d2.beta)) / 2;
}

namespace detail {

inline double diagonal_element(const Determinant& d, const SpatialIntegrals& ints) {
  double e = 0.0;
  for_each_bit(d.alpha, [&](int p) {
    e += ints.h(p, p);
    for_each_bit(d.alpha, [&](int q) {
      e += 0.5 * (ints.coulomb(p, q) - ints.exchange(p, q));
    });
    for_each_bit(d.beta, [&](int q) { e += ints.coulomb(p, q); });
  });
  for_each_bit(d.beta, [&](int p) {
    e += ints.h(p, p);
    for_each_bit(d.beta, [&](int q) {
      e += 0.5 * (ints.coulomb(p, q) - ints.exchange(p, q));
    });
  });
  return e;
}

// <d1|H|d2> for d1 = +-a+_a a_i d2 within one spin channel.
inline double single_element(OrbitalMask same2, OrbitalMask other2, int i, int a,
                             const SpatialIntegrals& ints) {
  const int lo = i < a ? i : a, hi = i < a ? a : i;
  const OrbitalMask between = (bit(hi) - 1) & ~(bit(lo + 1) - 1);
  const int sign = (std::popcount(same2 & between) & 1) ? -1 : 1;
  double v = ints.h(a, i);
  for_each_bit(same2 & ~bit(i), [&](int j) {
    v += ints.eri(a, i, j, j) - ints.eri(a, j, j, i);
  });
  for_each_bit(other2, [&](int j) { v += ints.eri(a, i, j, j); });
  return sign * v;
}

} // namespace detail

/// <d1|H|d2> without the core energy.
inline double slater_condon(const Determinant& d1, const Determinant& d2,
                            const SpatialIntegrals& ints) {
  if (d1.n_elec() != d2.n_elec())
    throw DomainError("slater_condon: unequal electron counts");
  const OrbitalMask da = d1.alpha ^ d2.alpha, db = d1.beta ^ d2.beta;
  const int na = std::popcount(da), nb = std::popcount(db);
  const int degree = (na + nb) / 2;
  if (degree == 0) return detail::diagonal_element(d1, ints);
  if (degree > 2) return 0.0;
  if (degree == 1) {
    if (na == 2)
      return detail::single_element(d2.alpha, d2.beta, std::countr_zero(da & d2.alpha),
                                    std::countr_zero(da & d1.alpha), ints);
    if (nb == 2)
      return detail::single_element(d2.beta, d2.alpha, std::countr_zero(db & d2.beta),
                                    std::countr_zero(db & d1.beta), ints);
    return 0.0; // S_z-changing pair
  }
  // Holes i<j (occupied in d2) and particles a<b (occupied in d1), blocked order.
  std::array<SpinOrbital, 2> holes{}, parts{};
  int nh = 0, np = 0;
  for_each_bit(da & d2.alpha, [&](int p) { holes[nh++] = alpha(p); });
  for_each_bit(db & d2.beta, [&](int p) { holes[nh++] = beta(p); });
  for_each_bit(da & d1.alpha, [&](int p) { parts[np++] = alpha(p); });
  for_each_bit(db & d1.beta, [&](int p) { parts[np++] = beta(p); });
  if (nh != 2 || np != 2) return 0.0;
  if ((holes[0].spin == Spin::alpha) + (holes[1].spin == Spin::alpha) !=
      (parts[0].spin == Spin::alpha) + (parts[1].spin == Spin::alpha))
    return 0.0;
  Determinant t = d2;
  int parity = elementary_parity(t, holes[0]);
  detail::toggle(t, holes[0]);
  parity ^= elementary_parity(t, holes[1]);
  detail::toggle(t, holes[1]);
  parity ^= elementary_parity(t, parts[1]);
  detail::toggle(t, parts[1]);
  parity ^= elementary_parity(t, parts[0]);
  const double v = so_eri(ints, parts[0], parts[1], holes[0], holes[1]);
  return parity ? -v : v;
}

} // namespace sparse_ucc
