/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

/// \file optimizer.hpp
/// Variational minimization of the circuit energy: the objective in reduced
/// (class) coordinates, central-difference gradients, and BFGS with a
/// strong-Wolfe line search.
///
/// The factor order is frozen from the starting parameters. Re-sorting by
/// |theta| as the parameters move would make the objective discontinuous.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sparse_ucc/circuit.hpp"
#include "sparse_ucc/error.hpp"
#include "sparse_ucc/symmetry.hpp"

namespace sparse_ucc {

/// Energy-versus-parameters problem bound to one pool and integral set.
class CircuitObjective {
public:
  /// `theta0` is the full (per-operator) starting vector; it fixes the
  /// application order under `ordering`.
  CircuitObjective(const SpatialIntegrals& ints, std::vector<ExcitationOp> pool,
                   std::vector<ParameterClass> classes, std::span<const double> theta0,
                   const Ordering& ordering = Ordering::magnitude(),
                   std::size_t n_wf = unlimited_nwf)
      : ints_(&ints), pool_(std::move(pool)), classes_(std::move(classes)), n_wf_(n_wf),
        reference_(reference_determinant(ints)) {
    if (theta0.size() != pool_.size())
      throw DomainError("objective: theta0 has " + std::to_string(theta0.size()) +
                        " entries for a pool of " + std::to_string(pool_.size()));
    if (n_wf_ == 0) throw ConfigError("n_wf must be at least 1");
    std::vector<std::size_t> seen(pool_.size(), 0);
    for (const auto& c : classes_) {
      if (c.members.empty() || c.members.size() != c.signs.size())
        throw DomainError("malformed parameter class");
      for (auto m : c.members) {
        if (m >= pool_.size()) throw RangeError("parameter class member outside the pool");
        ++seen[m];
      }
    }
    for (auto s : seen)
      if (s != 1) throw DomainError("parameter classes must partition the pool");
    order_ = ordering_permutation(make_factors(pool_, theta0), ordering);
  }

  std::size_t dimension() const { return classes_.size(); }
  const std::vector<ExcitationOp>& pool() const { return pool_; }
  const std::vector<ParameterClass>& classes() const { return classes_; }
  const std::vector<std::size_t>& application_order() const { return order_; }
  const SpatialIntegrals& integrals() const { return *ints_; }

  std::vector<double> reduce(std::span<const double> theta) const {
    return reduce_parameters(theta, classes_);
  }
  std::vector<double> expand(std::span<const double> params) const {
    return expand_parameters(params, classes_, pool_.size());
  }

  /// Factors for reduced parameters, in the frozen application order.
  std::vector<UccFactor> factors(std::span<const double> params) const {
    const auto theta = expand(params);
    std::vector<UccFactor> out;
    out.reserve(order_.size());
    for (auto k : order_) out.push_back({pool_[k], theta[k]});
    return out;
  }

  /// Total energy (Hartree). Safe to call concurrently.
  double operator()(std::span<const double> params) const {
    CircuitSpec spec;
    spec.factors = factors(params);
    spec.n_wf = n_wf_;
    return run_circuit(reference_, spec, *ints_).energy;
  }

private:
  const SpatialIntegrals* ints_;
  std::vector<ExcitationOp> pool_;
  std::vector<ParameterClass> classes_;
  std::size_t n_wf_;
  Determinant reference_;
  std::vector<std::size_t> order_;
};

using ScalarFunction = std::function<double(std::span<const double>)>;
using GradientFunction = std::function<std::vector<double>(std::span<const double>)>;

/// Central differences. The 2n evaluations are independent and run in
/// parallel; each component is formed from its own pair, so the result does
/// not depend on the thread count.
inline std::vector<double> gradient_fd(const ScalarFunction& f, std::span<const double> x,
                                       double h = 1e-5) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  std::vector<double> plus(x.size()), minus(x.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < 2 * n; ++k) {
    std::vector<double> y(x.begin(), x.end());
    const auto i = static_cast<std::size_t>(k / 2);
    y[i] += (k % 2 == 0) ? h : -h;
    (k % 2 == 0 ? plus : minus)[i] = f(y);
  }
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (plus[i] - minus[i]) / (2.0 * h);
  return g;
}

enum class InitialSource { mp2, ccsd, custom };

inline const char* to_string(InitialSource s) {
  switch (s) {
  case InitialSource::mp2: return "mp2";
  case InitialSource::ccsd: return "ccsd";
  case InitialSource::custom: return "custom";
  }
  return "?";
}

struct OptimizationStep {
  int iteration = 0;
  double energy = 0.0;
  double grad_norm = 0.0; // infinity norm
  std::size_t n_evals = 0; // cumulative objective evaluations
};

struct OptimizationTrace {
  std::vector<OptimizationStep> steps; // accepted iterates; steps[0] is the start
  InitialSource initial_source = InitialSource::custom;
};

struct MinimizeOptions {
  double gtol = 1e-3;   // stop when ||g||_inf < gtol
  int max_iter = 200;
  double fd_step = 1e-5;
  double c1 = 1e-4;     // sufficient decrease
  double c2 = 0.9;      // curvature
  int max_line_search = 30;
};

struct MinimizeResult {
  std::vector<double> x;
  double f = 0.0;
  std::vector<double> grad;
  int iterations = 0;
  bool converged = false;
  /// Set when the line search could not satisfy the Wolfe conditions; x is
  /// the best iterate found.
  bool line_search_failed = false;
  std::string message;
  OptimizationTrace trace;
};

namespace detail {

/// Minimizer of the cubic through (a, fa, fpa), (b, fb), (c, fc); nullopt
/// when degenerate. Same construction as the classical MINPACK/scipy zoom.
inline std::optional<double> cubic_min(double a, double fa, double fpa, double b, double fb,
                                       double c, double fc) {
  const double C = fpa, db = b - a, dc = c - a;
  const double denom = (db * dc) * (db * dc) * (db - dc);
  if (denom == 0.0) return std::nullopt;
  const double r1 = fb - fa - C * db, r2 = fc - fa - C * dc;
  const double A = (dc * dc * r1 - db * db * r2) / denom;
  const double B = (-dc * dc * dc * r1 + db * db * db * r2) / denom;
  const double rad = B * B - 3 * A * C;
  if (A == 0.0 || rad < 0.0) return std::nullopt;
  const double x = a + (-B + std::sqrt(rad)) / (3 * A);
  return std::isfinite(x) ? std::optional<double>(x) : std::nullopt;
}

inline std::optional<double> quad_min(double a, double fa, double fpa, double b, double fb) {
  const double db = b - a;
  const double B = (fb - fa - fpa * db) / (db * db);
  if (db == 0.0 || B <= 0.0) return std::nullopt;
  const double x = a - fpa / (2 * B);
  return std::isfinite(x) ? std::optional<double>(x) : std::nullopt;
}

} // namespace detail

/// BFGS (inverse-Hessian form) with a strong-Wolfe bracketing/zoom line
/// search. The initial inverse Hessian is the identity, rescaled by
/// y's/y'y before the first update. Without `gradient`, central
/// differences with step opt.fd_step are used; their truncation error sets
/// a floor below which gtol cannot be met.
inline MinimizeResult minimize(const ScalarFunction& f, std::vector<double> x0,
                               const MinimizeOptions& opt = {},
                               InitialSource source = InitialSource::custom,
                               const GradientFunction& gradient = {}) {
  if (!(opt.gtol > 0.0) || opt.max_iter < 0) throw ConfigError("minimize: bad options");
  using Vec = Eigen::VectorXd;
  const auto n = static_cast<Eigen::Index>(x0.size());
  MinimizeResult res;
  res.trace.initial_source = source;
  std::size_t evals = 0;

  auto checked = [](double v) {
    if (!std::isfinite(v)) throw DomainError("objective returned a non-finite value");
    return v;
  };
  auto fval = [&](const Vec& x) {
    ++evals;
    return checked(f(std::span<const double>(x.data(), static_cast<std::size_t>(x.size()))));
  };
  auto grad = [&](const Vec& x) {
    const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    std::vector<double> g;
    if (gradient) {
      g = gradient(xs);
      if (g.size() != xs.size()) throw DomainError("gradient has the wrong dimension");
    } else {
      evals += 2 * xs.size();
      g = gradient_fd(f, xs, opt.fd_step);
    }
    Vec out(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) out[k] = checked(g[static_cast<std::size_t>(k)]);
    return out;
  };

  Vec x = Eigen::Map<const Vec>(x0.data(), n);
  double fx = fval(x);
  Vec g = grad(x);
  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(n, n);
  bool first_update = true;
  res.trace.steps.push_back({0, fx, n ? g.lpNorm<Eigen::Infinity>() : 0.0, evals});

  int it = 0;
  while (true) {
    const double gnorm = n ? g.lpNorm<Eigen::Infinity>() : 0.0;
    if (gnorm < opt.gtol) {
      res.converged = true;
      res.message = "gradient norm below tolerance";
      break;
    }
    if (it >= opt.max_iter) {
      res.message = "iteration limit reached";
      break;
    }
    Vec p = -Hinv * g;
    double dphi0 = g.dot(p);
    if (!(dphi0 < 0.0)) { // not a descent direction: reset to steepest descent
      Hinv.setIdentity();
      first_update = true;
      p = -g;
      dphi0 = g.dot(p);
    }

    // Line search on phi(alpha) = f(x + alpha p).
    const double phi0 = fx;
    struct Point {
      double a, phi, dphi;
      Vec g;
    };
    auto probe = [&](double a) {
      Vec xa = x + a * p;
      const double ph = fval(xa);
      Vec ga = grad(xa);
      return Point{a, ph, ga.dot(p), std::move(ga)};
    };
    std::optional<Point> accepted;
    Point prev{0.0, phi0, dphi0, g};
    double a = 1.0;
    int evals_ls = 0;
    auto zoom = [&](Point lo, Point hi) -> std::optional<Point> {
      std::optional<Point> rec; // last discarded point, for the cubic
      for (; evals_ls < opt.max_line_search; ++evals_ls) {
        const double d = hi.a - lo.a;
        const double left = std::min(lo.a, hi.a), right = std::max(lo.a, hi.a);
        std::optional<double> t;
        if (rec) t = detail::cubic_min(lo.a, lo.phi, lo.dphi, hi.a, hi.phi, rec->a, rec->phi);
        if (!t || *t < left + 0.2 * (right - left) || *t > right - 0.2 * (right - left)) {
          t = detail::quad_min(lo.a, lo.phi, lo.dphi, hi.a, hi.phi);
          if (!t || *t < left + 0.1 * (right - left) || *t > right - 0.1 * (right - left))
            t = lo.a + 0.5 * d;
        }
        Point trial = probe(*t);
        if (trial.phi > phi0 + opt.c1 * trial.a * dphi0 || trial.phi >= lo.phi) {
          rec = std::move(hi);
          hi = std::move(trial);
        } else {
          if (std::abs(trial.dphi) <= -opt.c2 * dphi0) return trial;
          rec = hi;
          if (trial.dphi * (hi.a - lo.a) >= 0) hi = lo;
          lo = std::move(trial);
        }
        if (std::abs(hi.a - lo.a) < 1e-14 * std::max(1.0, std::abs(lo.a))) break;
      }
      return std::nullopt;
    };
    for (int k = 0; evals_ls < opt.max_line_search; ++k, ++evals_ls) {
      Point cur = probe(a);
      if (cur.phi > phi0 + opt.c1 * a * dphi0 || (k > 0 && cur.phi >= prev.phi)) {
        accepted = zoom(prev, cur);
        break;
      }
      if (std::abs(cur.dphi) <= -opt.c2 * dphi0) {
        accepted = std::move(cur);
        break;
      }
      if (cur.dphi >= 0) {
        accepted = zoom(cur, prev);
        break;
      }
      prev = std::move(cur);
      a *= 2.0;
    }
    if (!accepted) {
      res.line_search_failed = true;
      res.message = "line search failed to satisfy the Wolfe conditions";
      break;
    }

    const Vec s = accepted->a * p;
    const Vec y = accepted->g - g;
    x += s;
    fx = accepted->phi;
    g = accepted->g;
    ++it;
    res.trace.steps.push_back({it, fx, g.lpNorm<Eigen::Infinity>(), evals});

    const double ys = y.dot(s);
    if (ys > 1e-14 * s.norm() * y.norm()) {
      if (first_update) {
        Hinv *= ys / y.squaredNorm();
        first_update = false;
      }
      const double rho = 1.0 / ys;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      Hinv = (I - rho * s * y.transpose()) * Hinv * (I - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
  }
  res.x.assign(x.data(), x.data() + n);
  res.f = fx;
  res.grad.assign(g.data(), g.data() + n);
  res.iterations = it;
  return res;
}

/// iteration,e_total,e_corr,grad_norm,n_evals
inline void write_trace_csv(std::ostream& out, const OptimizationTrace& trace, double e_hf) {
  out << std::setprecision(12) << "iteration,e_total,e_corr,grad_norm,n_evals\n";
  for (const auto& s : trace.steps)
    out << s.iteration << ',' << s.energy << ',' << s.energy - e_hf << ',' << s.grad_norm << ','
        << s.n_evals << '\n';
}

} // namespace sparse_ucc
