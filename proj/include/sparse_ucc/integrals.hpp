/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

/// \file integrals.hpp
/// Molecular-orbital integrals read from FCIDUMP files, plus the spin-orbital
/// view used by the determinant and amplitude code.
///
/// Spin orbitals use a blocked linear encoding: alpha orbitals occupy
/// [0, n_orb), beta orbitals [n_orb, 2 n_orb).

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sparse_ucc/error.hpp"

namespace sparse_ucc {

enum class Spin : std::uint8_t { alpha = 0, beta = 1 };

constexpr Spin flip(Spin s) noexcept {
  return s == Spin::alpha ? Spin::beta : Spin::alpha;
}

/// A spatial orbital paired with a spin label. Ordering is (spin, spatial),
/// i.e. the blocked linear order.
struct SpinOrbital {
  Spin spin = Spin::alpha;
  std::uint8_t spatial = 0;

  constexpr auto operator<=>(const SpinOrbital&) const = default;

  constexpr int linear(int n_orb) const noexcept {
    return static_cast<int>(spatial) + (spin == Spin::beta ? n_orb : 0);
  }
  static SpinOrbital from_linear(int index, int n_orb) {
    if (index < 0 || index >= 2 * n_orb)
      throw RangeError("spin-orbital index " + std::to_string(index) +
                       " outside [0, " + std::to_string(2 * n_orb) + ")");
    return index < n_orb
               ? SpinOrbital{Spin::alpha, static_cast<std::uint8_t>(index)}
               : SpinOrbital{Spin::beta,
                             static_cast<std::uint8_t>(index - n_orb)};
  }
};

constexpr SpinOrbital alpha(int p) noexcept {
  return {Spin::alpha, static_cast<std::uint8_t>(p)};
}
constexpr SpinOrbital beta(int p) noexcept {
  return {Spin::beta, static_cast<std::uint8_t>(p)};
}

/// Index of the unordered pair {p, q} in packed lower-triangular storage.
constexpr std::size_t pair_index(std::size_t p, std::size_t q) noexcept {
  return p >= q ? p * (p + 1) / 2 + q : q * (q + 1) / 2 + p;
}

/// One- and two-electron integrals over spatial molecular orbitals.
///
/// Two-electron integrals are chemists' notation (pq|rs) stored once per
/// 8-fold permutational orbit (packed pair-of-pairs index), so every
/// equivalent access returns the same value.
class SpatialIntegrals {
public:
  SpatialIntegrals() = default;
  SpatialIntegrals(int n_orb, int n_elec, int ms2 = 0)
      : n_orb_(n_orb), n_elec_(n_elec), ms2_(ms2),
        orb_sym_(static_cast<std::size_t>(n_orb), 1),
        h_(static_cast<std::size_t>(n_orb) * n_orb, 0.0),
        eri_(packed_size(n_orb), 0.0), eri_set_(packed_size(n_orb), 0),
        h_set_(static_cast<std::size_t>(n_orb) * n_orb, 0) {
    if (n_orb <= 0 || n_orb > 64)
      throw RangeError("NORB must lie in [1, 64], got " +
                       std::to_string(n_orb));
    if (n_elec <= 0 || n_elec > 2 * n_orb)
      throw RangeError("NELEC must lie in [1, 2*NORB], got " +
                       std::to_string(n_elec));
    if (ms2 == 0 && n_elec % 2 != 0)
      throw DomainError("MS2=0 requires an even electron count");
    finalize();
  }

  int n_orb() const noexcept { return n_orb_; }
  int n_elec() const noexcept { return n_elec_; }
  int ms2() const noexcept { return ms2_; }
  /// Doubly occupied spatial orbitals of the closed-shell reference.
  int n_occ() const noexcept { return n_elec_ / 2; }
  double e_core() const noexcept { return e_core_; }
  const std::vector<int>& orb_sym() const noexcept { return orb_sym_; }
  /// Conflicting duplicate records seen while parsing (last write wins).
  int duplicate_warnings() const noexcept { return warnings_; }
  bool has_file_orbital_energies() const noexcept { return eps_from_file_; }

  double h(int p, int q) const noexcept {
    return h_[static_cast<std::size_t>(p) * n_orb_ + q];
  }
  double eri(int p, int q, int r, int s) const noexcept {
    return eri_[pair_index(pair_index(p, q), pair_index(r, s))];
  }
  /// (pp|qq)
  double coulomb(int p, int q) const noexcept {
    return j_[static_cast<std::size_t>(p) * n_orb_ + q];
  }
  /// (pq|qp)
  double exchange(int p, int q) const noexcept {
    return k_[static_cast<std::size_t>(p) * n_orb_ + q];
  }
  double orbital_energy(int p) const noexcept {
    return eps_[static_cast<std::size_t>(p)];
  }

  void set_e_core(double e) { e_core_ = e; }
  void set_orb_sym(std::vector<int> sym) {
    if (static_cast<int>(sym.size()) != n_orb_)
      throw ParseError("ORBSYM has " + std::to_string(sym.size()) +
                       " labels, expected " + std::to_string(n_orb_));
    orb_sym_ = std::move(sym);
  }
  void set_h(int p, int q, double v) {
    check(p);
    check(q);
    auto idx = static_cast<std::size_t>(p) * n_orb_ + q;
    if (h_set_[idx] && h_[idx] != v) ++warnings_;
    h_[idx] = v;
    h_[static_cast<std::size_t>(q) * n_orb_ + p] = v;
    h_set_[idx] = h_set_[static_cast<std::size_t>(q) * n_orb_ + p] = 1;
  }
  void set_eri(int p, int q, int r, int s, double v) {
    check(p);
    check(q);
    check(r);
    check(s);
    auto idx = pair_index(pair_index(p, q), pair_index(r, s));
    if (eri_set_[idx] && eri_[idx] != v) ++warnings_;
    eri_[idx] = v;
    eri_set_[idx] = 1;
  }
  void set_orbital_energy(int p, double v) {
    check(p);
    if (eps_file_.empty()) eps_file_.assign(static_cast<std::size_t>(n_orb_), 0.0);
    eps_file_[static_cast<std::size_t>(p)] = v;
    eps_from_file_ = true;
  }

  /// Rebuild cached Coulomb/exchange tables and orbital energies. Must be
  /// called after the last setter.
  void finalize() {
    const auto n = static_cast<std::size_t>(n_orb_);
    j_.assign(n * n, 0.0);
    k_.assign(n * n, 0.0);
    for (int p = 0; p < n_orb_; ++p)
      for (int q = 0; q < n_orb_; ++q) {
        j_[p * n + q] = eri(p, p, q, q);
        k_[p * n + q] = eri(p, q, q, p);
      }
    if (eps_from_file_) {
      eps_ = eps_file_;
    } else {
      eps_.assign(n, 0.0);
      for (int p = 0; p < n_orb_; ++p) {
        double e = h(p, p);
        for (int i = 0; i < n_occ(); ++i)
          e += 2.0 * coulomb(p, i) - exchange(p, i);
        eps_[static_cast<std::size_t>(p)] = e;
      }
    }
  }

  /// Visit every stored (canonical) two-electron integral as (p,q,r,s,v)
  /// with p>=q, r>=s, pq>=rs.
  template <typename F> void for_each_eri(F&& f) const {
    for (int p = 0; p < n_orb_; ++p)
      for (int q = 0; q <= p; ++q)
        for (int r = 0; r <= p; ++r)
          for (int s = 0; s <= (r == p ? q : r); ++s) {
            double v = eri(p, q, r, s);
            if (v != 0.0) f(p, q, r, s, v);
          }
  }

private:
  static std::size_t packed_size(int n) {
    auto np = static_cast<std::size_t>(n) * (n + 1) / 2;
    return np * (np + 1) / 2;
  }
  void check(int p) const {
    if (p < 0 || p >= n_orb_)
      throw RangeError("orbital index " + std::to_string(p + 1) +
                       " outside [1, " + std::to_string(n_orb_) + "]");
  }

  int n_orb_ = 0;
  int n_elec_ = 0;
  int ms2_ = 0;
  int warnings_ = 0;
  double e_core_ = 0.0;
  bool eps_from_file_ = false;
  std::vector<int> orb_sym_;
  std::vector<double> h_;
  std::vector<double> eri_;
  std::vector<char> eri_set_;
  std::vector<char> h_set_;
  std::vector<double> eps_file_;
  std::vector<double> eps_;
  std::vector<double> j_;
  std::vector<double> k_;
};

/// Antisymmetrized physicists' integral <pq||rs>.
inline double so_eri(const SpatialIntegrals& ints, SpinOrbital p, SpinOrbital q,
                     SpinOrbital r, SpinOrbital s) noexcept {
  double v = 0.0;
  if (p.spin == r.spin && q.spin == s.spin)
    v += ints.eri(p.spatial, r.spatial, q.spatial, s.spatial);
  if (p.spin == s.spin && q.spin == r.spin)
    v -= ints.eri(p.spatial, s.spatial, q.spatial, r.spatial);
  return v;
}

/// Energy of the closed-shell determinant with the n_elec/2 lowest spatial
/// orbitals doubly occupied, including e_core.
inline double hf_energy(const SpatialIntegrals& ints) {
  if (ints.ms2() != 0)
    throw UnsupportedError("hf_energy requires a closed-shell reference (MS2=0)");
  double e = ints.e_core();
  const int nocc = ints.n_occ();
  for (int i = 0; i < nocc; ++i) {
    e += 2.0 * ints.h(i, i);
    for (int j = 0; j < nocc; ++j)
      e += 2.0 * ints.coulomb(i, j) - ints.exchange(i, j);
  }
  return e;
}

/// Restrict to orbitals [n_frozen, n_frozen + n_active), folding the doubly
/// occupied frozen core into e_core and the one-electron integrals.
inline SpatialIntegrals active_window(const SpatialIntegrals& ints, int n_frozen,
                                      int n_active) {
  if (n_frozen < 0 || n_active <= 0 || n_frozen + n_active > ints.n_orb())
    throw RangeError("active window [" + std::to_string(n_frozen) + ", " +
                     std::to_string(n_frozen + n_active) +
                     ") outside the orbital range");
  if (2 * n_frozen >= ints.n_elec())
    throw DomainError("frozen core would remove every electron");
  SpatialIntegrals out(n_active, ints.n_elec() - 2 * n_frozen, ints.ms2());
  double ecore = ints.e_core();
  for (int c = 0; c < n_frozen; ++c) {
    ecore += 2.0 * ints.h(c, c);
    for (int d = 0; d < n_frozen; ++d)
      ecore += 2.0 * ints.coulomb(c, d) - ints.exchange(c, d);
  }
  out.set_e_core(ecore);
  std::vector<int> sym(ints.orb_sym().begin() + n_frozen,
                       ints.orb_sym().begin() + n_frozen + n_active);
  out.set_orb_sym(std::move(sym));
  for (int p = 0; p < n_active; ++p)
    for (int q = 0; q <= p; ++q) {
      const int P = p + n_frozen, Q = q + n_frozen;
      double v = ints.h(P, Q);
      for (int c = 0; c < n_frozen; ++c)
        v += 2.0 * ints.eri(P, Q, c, c) - ints.eri(P, c, c, Q);
      if (v != 0.0) out.set_h(p, q, v);
    }
  for (int p = 0; p < n_active; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r <= p; ++r)
        for (int s = 0; s <= (r == p ? q : r); ++s) {
          double v = ints.eri(p + n_frozen, q + n_frozen, r + n_frozen,
                              s + n_frozen);
          if (v != 0.0) out.set_eri(p, q, r, s, v);
        }
  if (ints.has_file_orbital_energies())
    for (int p = 0; p < n_active; ++p)
      out.set_orbital_energy(p, ints.orbital_energy(p + n_frozen));
  out.finalize();
  return out;
}

namespace detail {

inline std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

inline long parse_int_token(const std::string& tok, const std::string& key) {
  long v = 0;
  auto* first = tok.data();
  auto* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError("FCIDUMP header: bad value '" + tok + "' for " + key);
  return v;
}

inline double parse_fortran_double(std::string tok) {
  for (auto& c : tok)
    if (c == 'D' || c == 'd') c = 'E';
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size()) throw ParseError("bad floating-point value '" + tok + "'");
  return v;
}

} // namespace detail

/// Parse FCIDUMP text. Indices in the file are 1-based chemists' notation.
inline SpatialIntegrals parse_fcidump(std::istream& in) {
  std::string header;
  std::string line;
  bool terminated = false;
  while (std::getline(in, line)) {
    auto up = detail::upper(line);
    auto end = up.find("&END");
    if (end == std::string::npos) {
      // Namelist '/' terminator, alone or closing the last header line.
      auto last = up.find_last_not_of(" \t\r");
      if (last != std::string::npos && up[last] == '/') {
        header += line.substr(0, last);
        terminated = true;
        break;
      }
      header += line + ' ';
      continue;
    }
    header += line.substr(0, end);
    terminated = true;
    break;
  }
  if (!terminated) throw ParseError("FCIDUMP header: missing &END or '/' terminator");

  for (auto& c : header)
    if (c == ',' || c == '\t' || c == '\r') c = ' ';
  std::istringstream hs(header);
  std::string tok;
  if (!(hs >> tok) || detail::upper(tok).rfind("&FCI", 0) != 0)
    throw ParseError("FCIDUMP header: expected '&FCI', got '" + tok + "'");
  tok = tok.substr(4);

  std::vector<std::pair<std::string, std::vector<std::string>>> entries;
  auto consume = [&](std::string t) {
    while (!t.empty()) {
      auto eq = t.find('=');
      if (eq == std::string::npos) {
        if (entries.empty()) throw ParseError("FCIDUMP header: unexpected token '" + t + "'");
        entries.back().second.push_back(t);
        return;
      }
      auto key = detail::upper(t.substr(0, eq));
      if (key.empty()) throw ParseError("FCIDUMP header: unexpected token '" + t + "'");
      entries.push_back({key, {}});
      t = t.substr(eq + 1);
    }
  };
  consume(tok);
  while (hs >> tok) consume(tok);

  long norb = -1, nelec = -1, ms2 = 0;
  std::vector<int> orbsym;
  for (const auto& [key, vals] : entries) {
    auto single = [&]() -> long {
      if (vals.size() != 1)
        throw ParseError("FCIDUMP header: " + key + " expects one value");
      return detail::parse_int_token(vals.front(), key);
    };
    if (key == "NORB") norb = single();
    else if (key == "NELEC") nelec = single();
    else if (key == "MS2") ms2 = single();
    else if (key == "ORBSYM") {
      for (const auto& v : vals)
        orbsym.push_back(static_cast<int>(detail::parse_int_token(v, key)));
    } else if (key == "IUHF" || key == "UHF") {
      if (!vals.empty()) {
        auto v = detail::upper(vals.front());
        if (v == "1" || v == ".TRUE." || v == "T" || v == "TRUE")
          throw UnsupportedError("unrestricted FCIDUMP files are not supported");
      }
    }
  }
  if (norb < 0) throw ParseError("FCIDUMP header: missing NORB");
  if (nelec < 0) throw ParseError("FCIDUMP header: missing NELEC");

  SpatialIntegrals ints(static_cast<int>(norb), static_cast<int>(nelec),
                        static_cast<int>(ms2));
  if (!orbsym.empty()) ints.set_orb_sym(std::move(orbsym));

  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.find('(') != std::string::npos)
      throw UnsupportedError("complex integrals are not supported (record " +
                             std::to_string(lineno) + ")");
    std::istringstream ls(line);
    std::string vtok;
    long idx[4];
    if (!(ls >> vtok >> idx[0] >> idx[1] >> idx[2] >> idx[3]))
      throw ParseError("FCIDUMP record " + std::to_string(lineno) +
                       ": expected 'value i j k l'");
    double v = 0.0;
    try {
      v = detail::parse_fortran_double(vtok);
    } catch (const ParseError& e) {
      throw ParseError("FCIDUMP record " + std::to_string(lineno) + ": " + e.what());
    }
    for (long i : idx)
      if (i < 0 || i > norb)
        throw RangeError("FCIDUMP record " + std::to_string(lineno) + ": index " +
                         std::to_string(i) + " outside [1, " + std::to_string(norb) + "]");
    const int i = static_cast<int>(idx[0]) - 1, j = static_cast<int>(idx[1]) - 1,
              k = static_cast<int>(idx[2]) - 1, l = static_cast<int>(idx[3]) - 1;
    if (idx[0] == 0 && idx[1] == 0 && idx[2] == 0 && idx[3] == 0) {
      ints.set_e_core(v);
    } else if (idx[2] == 0 && idx[3] == 0) {
      if (idx[0] == 0)
        throw RangeError("FCIDUMP record " + std::to_string(lineno) + ": index 0 in one-electron term");
      if (idx[1] == 0)
        ints.set_orbital_energy(i, v);
      else
        ints.set_h(i, j, v);
    } else {
      if (idx[0] == 0 || idx[1] == 0 || idx[2] == 0 || idx[3] == 0)
        throw RangeError("FCIDUMP record " + std::to_string(lineno) + ": index 0 in two-electron term");
      ints.set_eri(i, j, k, l, v);
    }
  }
  ints.finalize();
  return ints;
}

inline SpatialIntegrals parse_fcidump_text(const std::string& text) {
  std::istringstream in(text);
  return parse_fcidump(in);
}

inline SpatialIntegrals read_fcidump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open FCIDUMP '" + path + "'");
  return parse_fcidump(in);
}

/// Write in the same grammar parse_fcidump accepts; values printed with
/// round-trip precision.
inline void write_fcidump(std::ostream& out, const SpatialIntegrals& ints) {
  out << " &FCI NORB=" << ints.n_orb() << ",NELEC=" << ints.n_elec()
      << ",MS2=" << ints.ms2() << ",\n  ORBSYM=";
  for (int p = 0; p < ints.n_orb(); ++p) out << ints.orb_sym()[p] << ',';
  out << "\n  ISYM=1,\n &END\n";
  out << std::setprecision(17);
  ints.for_each_eri([&](int p, int q, int r, int s, double v) {
    out << v << ' ' << p + 1 << ' ' << q + 1 << ' ' << r + 1 << ' ' << s + 1 << '\n';
  });
  for (int p = 0; p < ints.n_orb(); ++p)
    for (int q = 0; q <= p; ++q)
      if (ints.h(p, q) != 0.0)
        out << ints.h(p, q) << ' ' << p + 1 << ' ' << q + 1 << " 0 0\n";
  if (ints.has_file_orbital_energies())
    for (int p = 0; p < ints.n_orb(); ++p)
      out << ints.orbital_energy(p) << ' ' << p + 1 << " 0 0 0\n";
  out << ints.e_core() << " 0 0 0 0\n";
}

} // namespace sparse_ucc
