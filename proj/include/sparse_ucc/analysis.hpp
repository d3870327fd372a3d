/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

/// \file analysis.hpp
/// N_WF sweeps, quadratic extrapolation in 1/N_WF, fit-window studies and
/// factor-ordering statistics.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sparse_ucc/circuit.hpp"
#include "sparse_ucc/error.hpp"
#include "sparse_ucc/integrals.hpp"

namespace sparse_ucc {

/// Everything run_circuit needs except n_wf.
struct CircuitTemplate {
  const SpatialIntegrals* ints = nullptr;
  Determinant reference;
  std::vector<UccFactor> factors; // application order
};

struct SweepPoint {
  std::size_t n_wf = 0;
  double e_total = 0.0;
  double e_corr = 0.0;
  std::size_t peak_support = 0;
};

/// Points with strictly increasing n_wf.
struct SweepSeries {
  std::vector<SweepPoint> points;

  void validate() const {
    for (std::size_t k = 1; k < points.size(); ++k)
      if (points[k].n_wf <= points[k - 1].n_wf)
        throw DomainError("sweep n_wf values must be strictly increasing");
  }
};

/// count values log-spaced over [lo, hi], rounded and deduplicated.
inline std::vector<std::size_t> log_grid(std::size_t lo, std::size_t hi, int count) {
  if (lo == 0 || hi < lo || count < 1) throw DomainError("log_grid: bad range");
  std::vector<std::size_t> out;
  const double a = std::log10(static_cast<double>(lo)), b = std::log10(static_cast<double>(hi));
  for (int k = 0; k < count; ++k) {
    const double x = count == 1 ? a : a + (b - a) * k / (count - 1);
    auto v = static_cast<std::size_t>(std::llround(std::pow(10.0, x)));
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  return out;
}

/// 40 points from 10^2 to 10^5.
inline std::vector<std::size_t> default_nwf_grid() { return log_grid(100, 100000, 40); }

/// One run_circuit per n_wf. Once a run never truncates (peak support <=
/// n_wf), every larger n_wf reproduces it exactly and is not rerun.
inline SweepSeries nwf_sweep(const CircuitTemplate& tpl, std::span<const std::size_t> n_wf_values) {
  if (!tpl.ints) throw ConfigError("nwf_sweep: template has no integrals");
  for (std::size_t k = 1; k < n_wf_values.size(); ++k)
    if (n_wf_values[k] <= n_wf_values[k - 1])
      throw DomainError("nwf_sweep: n_wf values must be strictly ascending");
  const double e_hf = energy(SparseWavefunction(tpl.reference), *tpl.ints);
  SweepSeries out;
  std::optional<CircuitResult> saturated;
  for (auto n : n_wf_values) {
    double e = 0.0;
    std::size_t peak = 0;
    if (saturated && saturated->peak_support <= n) {
      e = saturated->energy;
      peak = saturated->peak_support;
    } else {
      CircuitSpec spec;
      spec.factors = tpl.factors;
      spec.n_wf = n;
      auto r = run_circuit(tpl.reference, spec, *tpl.ints);
      e = r.energy;
      peak = r.peak_support;
      if (!r.truncated) saturated = std::move(r);
    }
    out.points.push_back({n, e, e - e_hf, peak});
  }
  return out;
}

/// Which sweep points enter a fit.
struct FitWindow {
  enum class Kind { all, largest, smallest_above } kind = Kind::largest;
  std::size_t count = 20;     // largest / smallest_above
  std::size_t n_wf_min = 0;   // smallest_above: strictly greater than this

  static FitWindow all() { return {Kind::all, 0, 0}; }
  static FitWindow largest(std::size_t n) { return {Kind::largest, n, 0}; }
  static FitWindow smallest_above(std::size_t n_wf_min, std::size_t n_fit) {
    return {Kind::smallest_above, n_fit, n_wf_min};
  }

  std::vector<SweepPoint> select(const SweepSeries& s) const {
    std::vector<SweepPoint> pts;
    switch (kind) {
    case Kind::all: pts = s.points; break;
    case Kind::largest: {
      const std::size_t m = std::min(count, s.points.size());
      pts.assign(s.points.end() - static_cast<std::ptrdiff_t>(m), s.points.end());
      break;
    }
    case Kind::smallest_above:
      for (const auto& p : s.points)
        if (p.n_wf > n_wf_min && pts.size() < count) pts.push_back(p);
      break;
    }
    return pts;
  }

  std::string describe() const {
    switch (kind) {
    case Kind::all: return "all";
    case Kind::largest: return "largest:" + std::to_string(count);
    case Kind::smallest_above:
      return "smallest_above:" + std::to_string(n_wf_min) + ":" + std::to_string(count);
    }
    return "?";
  }
};

/// E = a x^2 + b x + c with x = 1/N_WF.
struct ExtrapolationFit {
  double a = 0.0, b = 0.0, c = 0.0;
  /// Ordinary least-squares standard error of c; NaN with zero degrees of
  /// freedom.
  double sigma_c = 0.0;
  double max_residual = 0.0;
  std::vector<SweepPoint> window;
};

/// Unweighted quadratic least squares of (x, y) pairs; returns (a, b, c,
/// sigma_c, max |residual|).
inline ExtrapolationFit quadratic_fit(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n < 3) throw FitError("quadratic fit needs at least 3 points, got " + std::to_string(n));
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) scale = 1.0;
  // Columns scaled by powers of max|x| for conditioning.
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd Y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double u = x[static_cast<std::size_t>(k)] / scale;
    X(k, 0) = u * u;
    X(k, 1) = u;
    X(k, 2) = 1.0;
    Y[k] = y[static_cast<std::size_t>(k)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-12);
  if (qr.rank() < 3) throw FitError("singular normal equations (fewer than 3 distinct abscissae)");
  const Eigen::VectorXd beta = qr.solve(Y);
  const Eigen::VectorXd res = Y - X * beta;
  ExtrapolationFit fit;
  fit.a = beta[0] / (scale * scale);
  fit.b = beta[1] / scale;
  fit.c = beta[2];
  fit.max_residual = res.lpNorm<Eigen::Infinity>();
  if (n > 3) {
    const double s2 = res.squaredNorm() / static_cast<double>(n - 3);
    const Eigen::Matrix3d cov = s2 * (X.transpose() * X).inverse();
    fit.sigma_c = std::sqrt(std::max(0.0, cov(2, 2)));
  } else {
    fit.sigma_c = std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

/// Fit the selected window of `series` (energies as recorded, e.g. e_corr).
inline ExtrapolationFit extrapolate(const SweepSeries& series,
                                    const FitWindow& window = FitWindow::largest(20),
                                    bool use_correlation = true) {
  series.validate();
  auto pts = window.select(series);
  if (pts.size() < 3)
    throw FitError("fit window " + window.describe() + " selects " + std::to_string(pts.size()) +
                   " points; at least 3 required");
  std::vector<double> x, y;
  for (const auto& p : pts) {
    x.push_back(1.0 / static_cast<double>(p.n_wf));
    y.push_back(use_correlation ? p.e_corr : p.e_total);
  }
  auto fit = quadratic_fit(x, y);
  fit.window = std::move(pts);
  return fit;
}

struct FitWindowCell {
  std::size_t n_wf_min = 0;
  std::size_t n_fit = 0;
  std::optional<double> intercept; // missing when the cell has < 3 points
  double sigma_c = 0.0;
};

struct FitWindowRow {
  std::size_t n_wf_min = 0;
  std::vector<FitWindowCell> cells;
  /// Quadratic fit of intercept versus 1/N_fit; missing with < 3 cells.
  std::optional<ExtrapolationFit> secondary;
  /// Intercept at the largest N_fit with a value.
  std::optional<double> at_max_fit;
};

struct FitWindowStudy {
  std::vector<FitWindowRow> rows;
  /// max - min over rows of the secondary intercepts and of at_max_fit.
  double spread_secondary = 0.0;
  double spread_at_max_fit = 0.0;
};

inline FitWindowStudy fit_window_study(const SweepSeries& series,
                                       std::span<const std::size_t> n_wf_min_values,
                                       std::span<const std::size_t> n_fit_values) {
  FitWindowStudy study;
  std::vector<double> sec, last;
  for (auto nmin : n_wf_min_values) {
    FitWindowRow row;
    row.n_wf_min = nmin;
    std::vector<double> xs, ys;
    for (auto nfit : n_fit_values) {
      FitWindowCell cell{nmin, nfit, std::nullopt, 0.0};
      auto w = FitWindow::smallest_above(nmin, nfit);
      // A cell that cannot fill n_fit points duplicates a smaller one.
      if (w.select(series).size() == nfit) {
        try {
          auto fit = extrapolate(series, w);
          cell.intercept = fit.c;
          cell.sigma_c = fit.sigma_c;
          xs.push_back(1.0 / static_cast<double>(nfit));
          ys.push_back(fit.c);
          row.at_max_fit = fit.c;
        } catch (const FitError&) {
        }
      }
      row.cells.push_back(cell);
    }
    if (xs.size() >= 3) {
      try {
        row.secondary = quadratic_fit(xs, ys);
        sec.push_back(row.secondary->c);
      } catch (const FitError&) {
      }
    }
    if (row.at_max_fit) last.push_back(*row.at_max_fit);
    study.rows.push_back(std::move(row));
  }
  auto spread = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };
  study.spread_secondary = spread(sec);
  study.spread_at_max_fit = spread(last);
  return study;
}

struct OrderingStudy {
  std::vector<std::uint64_t> seeds;
  std::vector<double> e_corr; // per random ordering
  double mean = 0.0;
  double stddev = 0.0; // sample standard deviation
  double min = 0.0;
  double max = 0.0;
  double magnitude_e_corr = 0.0;
  /// magnitude_e_corr - min (positive when magnitude order is above the
  /// best random ordering).
  double magnitude_offset = 0.0;
};

/// Correlation energy for n_orderings seeded random permutations of the
/// template's factors, plus the magnitude ordering.
inline OrderingStudy ordering_study(const CircuitTemplate& tpl, std::size_t n_orderings,
                                    std::uint64_t seed, std::size_t n_wf) {
  if (n_orderings < 2) throw DomainError("ordering_study needs at least 2 orderings");
  if (!tpl.ints) throw ConfigError("ordering_study: template has no integrals");
  const double e_hf = energy(SparseWavefunction(tpl.reference), *tpl.ints);
  auto run = [&](const Ordering& ord) {
    CircuitSpec spec;
    spec.factors = order_factors(tpl.factors, ord);
    spec.n_wf = n_wf;
    return run_circuit(tpl.reference, spec, *tpl.ints).energy - e_hf;
  };
  OrderingStudy st;
  st.seeds.resize(n_orderings);
  st.e_corr.resize(n_orderings);
  for (std::size_t k = 0; k < n_orderings; ++k) {
    st.seeds[k] = fan_out_seed(seed, k);
    st.e_corr[k] = run(Ordering::random(st.seeds[k]));
  }
  double sum = 0.0;
  for (double e : st.e_corr) sum += e;
  st.mean = sum / static_cast<double>(n_orderings);
  double ss = 0.0;
  for (double e : st.e_corr) ss += (e - st.mean) * (e - st.mean);
  st.stddev = std::sqrt(ss / static_cast<double>(n_orderings - 1));
  st.min = *std::min_element(st.e_corr.begin(), st.e_corr.end());
  st.max = *std::max_element(st.e_corr.begin(), st.e_corr.end());
  st.magnitude_e_corr = run(Ordering::magnitude());
  st.magnitude_offset = st.magnitude_e_corr - st.min;
  return st;
}

namespace detail {
inline std::ostream& precise(std::ostream& out) { return out << std::setprecision(12); }
} // namespace detail

inline void write_sweep_csv(std::ostream& out, const SweepSeries& s) {
  detail::precise(out) << "n_wf,e_total,e_corr\n";
  for (const auto& p : s.points) out << p.n_wf << ',' << p.e_total << ',' << p.e_corr << '\n';
}

inline void write_fit_csv(std::ostream& out, const ExtrapolationFit& f, const FitWindow& w) {
  detail::precise(out) << "a,b,c,sigma_c,window\n"
                       << f.a << ',' << f.b << ',' << f.c << ',' << f.sigma_c << ','
                       << w.describe() << '\n';
}

inline void write_ordering_csv(std::ostream& out, const OrderingStudy& st) {
  detail::precise(out) << "ordering_id,seed,e_corr\n";
  for (std::size_t k = 0; k < st.e_corr.size(); ++k)
    out << k << ',' << st.seeds[k] << ',' << st.e_corr[k] << '\n';
  out << "magnitude,," << st.magnitude_e_corr << '\n';
}

/// Parse "n_wf,e_total,e_corr" rows (header required).
inline SweepSeries read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("sweep CSV: empty input");
  SweepSeries s;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      auto pos = line.find(',', start);
      f.push_back(line.substr(start, pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (f.size() < 3) throw ParseError("sweep CSV row " + std::to_string(row) + ": expected 3 fields");
    try {
      SweepPoint p;
      p.n_wf = static_cast<std::size_t>(std::stoull(f[0]));
      p.e_total = std::stod(f[1]);
      p.e_corr = std::stod(f[2]);
      s.points.push_back(p);
    } catch (const std::exception&) {
      throw ParseError("sweep CSV row " + std::to_string(row) + ": bad number");
    }
  }
  s.validate();
  return s;
}

} // namespace sparse_ucc
