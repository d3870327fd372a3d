/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

/// \file symmetry.hpp
/// Parameter reduction for singlet references: point-group filtering of the
/// operator pool and spin-complement parameter classes.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparse_ucc/determinant.hpp"
#include "sparse_ucc/error.hpp"

namespace sparse_ucc {

/// Product of the irreps touched by op. Labels follow the 1-based abelian
/// (D2h and subgroups) convention where the product is XOR of (label - 1).
inline int irrep_product(const ExcitationOp& op, std::span<const int> orb_sym) {
  int x = 0;
  auto fold = [&](SpinOrbital p) {
    if (p.spatial >= orb_sym.size())
      throw RangeError("operator orbital " + std::to_string(p.spatial) + " has no ORBSYM label");
    const int label = orb_sym[p.spatial];
    if (label < 1 || label > 8)
      throw UnsupportedError("ORBSYM label " + std::to_string(label) +
                             " is not an abelian (D2h subgroup) irrep");
    x ^= label - 1;
  };
  for (auto p : op.annihilate()) fold(p);
  for (auto p : op.create()) fold(p);
  return x;
}

/// Keep only totally symmetric operators.
inline std::vector<ExcitationOp> point_group_filter(std::span<const ExcitationOp> pool,
                                                    std::span<const int> orb_sym) {
  std::vector<ExcitationOp> out;
  out.reserve(pool.size());
  for (const auto& op : pool)
    if (irrep_product(op, orb_sym) == 0) out.push_back(op);
  return out;
}

/// Operators sharing one variational parameter: theta(member k) =
/// signs[k] * parameter. members[0] is the canonical representative with
/// sign +1.
struct ParameterClass {
  std::vector<std::size_t> members; // indices into the pool
  std::vector<int> signs;
};

/// Group each pool operator with its alpha<->beta mirror. Mirrors absent
/// from the pool, and operators that are their own mirror, form singletons.
inline std::vector<ParameterClass> spin_complement_classes(std::span<const ExcitationOp> pool) {
  std::map<ExcitationOp, std::size_t> where;
  for (std::size_t k = 0; k < pool.size(); ++k) where.emplace(pool[k].canonical().first, k);
  std::vector<ParameterClass> classes;
  std::vector<char> done(pool.size(), 0);
  for (std::size_t k = 0; k < pool.size(); ++k) {
    if (done[k]) continue;
    done[k] = 1;
    ParameterClass c{{k}, {1}};
    // pool[k] = s0 * canon(pool[k]); mirror(pool[k]) = sm * canon(mirror).
    // A singlet gives theta(mirror(pool[k])) = theta(pool[k]).
    auto [self, s0] = pool[k].canonical();
    auto [mc, sm] = self.spin_mirror().canonical();
    (void)s0;
    if (mc != self) {
      if (auto it = where.find(mc); it != where.end() && !done[it->second]) {
        const std::size_t j = it->second;
        const int sj = pool[j].canonical().second;
        done[j] = 1;
        c.members.push_back(j);
        // theta(pool[j]) * pool[j] == theta(mc) * mc, theta(mc) = sm * theta(self).
        c.signs.push_back(sm * sj * s0);
      }
    }
    classes.push_back(std::move(c));
  }
  return classes;
}

/// One class per operator.
inline std::vector<ParameterClass> identity_classes(std::size_t n) {
  std::vector<ParameterClass> c(n);
  for (std::size_t k = 0; k < n; ++k) c[k] = {{k}, {1}};
  return c;
}

/// Class parameters taken from each canonical member's theta.
inline std::vector<double> reduce_parameters(std::span<const double> theta,
                                             std::span<const ParameterClass> classes) {
  std::vector<double> p;
  p.reserve(classes.size());
  for (const auto& c : classes) p.push_back(c.signs.front() * theta[c.members.front()]);
  return p;
}

inline std::vector<double> expand_parameters(std::span<const double> params,
                                             std::span<const ParameterClass> classes,
                                             std::size_t pool_size) {
  if (params.size() != classes.size())
    throw DomainError("parameter vector has " + std::to_string(params.size()) +
                      " entries for " + std::to_string(classes.size()) + " classes");
  std::vector<double> theta(pool_size, 0.0);
  for (std::size_t c = 0; c < classes.size(); ++c)
    for (std::size_t k = 0; k < classes[c].members.size(); ++k)
      theta[classes[c].members[k]] = classes[c].signs[k] * params[c];
  return theta;
}

inline nlohmann::json classes_to_json(std::span<const ParameterClass> classes,
                                      std::span<const ExcitationOp> pool, int n_orb) {
  auto out = nlohmann::json::array();
  for (const auto& c : classes) {
    auto members = nlohmann::json::array();
    for (std::size_t k = 0; k < c.members.size(); ++k) {
      const auto& op = pool[c.members[k]];
      nlohmann::json m;
      m["annihilate"] = nlohmann::json::array();
      m["create"] = nlohmann::json::array();
      for (auto p : op.annihilate()) m["annihilate"].push_back(p.linear(n_orb));
      for (auto p : op.create()) m["create"].push_back(p.linear(n_orb));
      m["sign"] = c.signs[k];
      members.push_back(std::move(m));
    }
    out.push_back({{"members", std::move(members)}});
  }
  return out;
}

} // namespace sparse_ucc
