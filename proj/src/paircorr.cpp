#include "diagpc/paircorr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "diagpc/errors.hpp"
#include "diagpc/parallel.hpp"

namespace diagpc {

namespace {

/// Pointer pair for row i: [lo, hi) holds every j with v[i] - v[j] in [a, b).
/// Both predicates are monotone in j and in i because rounded subtraction is
/// monotone, so the fast path applies exactly the brute-force predicate.
struct RowSweep {
  std::span<const double> v;
  double a;
  double b;
  std::size_t lo = 0;
  std::size_t hi = 0;

  void seek(std::size_t i) {
    const double x = v[i];
    lo = static_cast<std::size_t>(
        std::partition_point(v.begin(), v.end(), [&](double y) { return x - y >= b; }) -
        v.begin());
    hi = static_cast<std::size_t>(
        std::partition_point(v.begin(), v.end(), [&](double y) { return x - y >= a; }) -
        v.begin());
  }

  void advance(std::size_t i) {
    const double x = v[i];
    const std::size_t n = v.size();
    while (lo < n && x - v[lo] >= b) ++lo;
    while (hi < n && x - v[hi] >= a) ++hi;
  }
};

std::vector<std::pair<std::size_t, std::size_t>> segments(std::size_t n, int threads) {
  const std::size_t parts = std::max<std::size_t>(1, static_cast<std::size_t>(std::max(1, threads)));
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t p = 0; p < parts; ++p) {
    const std::size_t s = n * p / parts;
    const std::size_t e = n * (p + 1) / parts;
    if (s < e) out.emplace_back(s, e);
  }
  return out;
}

}  // namespace

std::int64_t ordered_pair_count(std::span<const double> v, const Window& window, int threads) {
  const bool self_in_window = window.contains(0.0);
  const auto segs = segments(v.size(), threads);
  std::vector<std::int64_t> partial(segs.size(), 0);
  parallel_for(segs.size(), threads, [&](std::size_t s) {
    RowSweep sweep{v, window.a(), window.b()};
    sweep.seek(segs[s].first);
    std::int64_t count = 0;
    for (std::size_t i = segs[s].first; i < segs[s].second; ++i) {
      sweep.advance(i);
      count += static_cast<std::int64_t>(sweep.hi - sweep.lo);
      if (self_in_window) --count;
    }
    partial[s] = count;
  });
  std::int64_t total = 0;
  for (auto c : partial) total += c;
  return total;
}

std::int64_t brute_force_pair_count(std::span<const double> values, const Window& window) {
  if (values.size() > kBruteForceLimit) {
    throw CapacityError("brute_force_pair_count refuses N = " + std::to_string(values.size()) +
                        " > " + std::to_string(kBruteForceLimit));
  }
  std::int64_t count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (i != j && window.contains(values[i] - values[j])) ++count;
    }
  }
  return count;
}

double boundary_tolerance(double T) {
  const double t = std::abs(T);
  return 16.0 * (std::nextafter(t, std::numeric_limits<double>::infinity()) - t);
}

PairCorrEstimate estimate_from_values(const Form& form, const ValueList& values,
                                      const Window& window, std::optional<double> constant,
                                      int threads) {
  PairCorrEstimate est;
  est.N = values.size();
  est.T = values.threshold();
  est.normalization_exponent = is_quadratic(form) ? 1.5 : 1.0;
  est.count = ordered_pair_count(values.values(), window, threads);
  const double tau = boundary_tolerance(est.T);
  if (window.width() > 2 * tau) {
    est.count_inner =
        ordered_pair_count(values.values(), Window(window.a() + tau, window.b() - tau), threads);
  } else {
    est.count_inner = 0;
  }
  est.count_outer =
      ordered_pair_count(values.values(), Window(window.a() - tau, window.b() + tau), threads);
  est.R = static_cast<double>(est.count) / std::pow(est.T, est.normalization_exponent);
  if (constant) {
    est.constant = *constant;
    est.prediction = is_quadratic(form) ? *constant * std::sqrt(est.T) * window.width()
                                        : *constant * window.width();
    if (*est.prediction > 0) est.ratio = est.R / *est.prediction;
  }
  return est;
}

PairCorrEstimate pair_correlation(const Form& form, double T, const Window& window,
                                  const PairCorrOptions& opts) {
  if (!is_quadratic(form) && !(window.a() > 0)) {
    std::ostringstream msg;
    msg << "power-form pair correlation needs 0 < a < b, got [" << window.a() << ", "
        << window.b() << ")";
    throw ConfigError(msg.str());
  }
  std::optional<double> c;
  if (opts.with_constant) c = gated_pair_constant(form, opts.monte_carlo).value;
  const auto values = enumerate_values(form, T, opts.enumeration);
  return estimate_from_values(form, values, window, c, opts.enumeration.threads);
}

namespace {

inline bool close_u32(std::int32_t x, std::int32_t y, std::uint32_t reach, std::uint32_t span) {
  return static_cast<std::uint32_t>(x) - static_cast<std::uint32_t>(y) + reach <= span;
}

}  // namespace

NearDiagonalCount near_diagonal_count(const ValueList& values, const Window& window,
                                      double theta) {
  if (!values.has_points()) {
    throw ConfigError("near_diagonal_count needs lattice points (enumerate with retain_points)");
  }
  if (!(theta >= 0)) throw ConfigError("near_diagonal_count needs theta >= 0");
  const double L = std::pow(values.threshold(), theta);
  // |m - n| < L for integers  <=>  |m - n| <= ceil(L) - 1
  const double reach_d = std::ceil(L) - 1.0;
  if (reach_d > 1e9) throw ConfigError("near-diagonal reach too large");
  const auto reach = static_cast<std::uint32_t>(std::max(0.0, reach_d));
  const std::uint32_t span = 2 * reach;
  const int d = values.dimension();
  const auto v = values.values();
  const bool self_in_window = window.contains(0.0);

  NearDiagonalCount out;
  RowSweep sweep{v, window.a(), window.b()};
  if (!v.empty()) sweep.seek(0);
  std::vector<std::span<const std::int32_t>> c;
  for (int i = 0; i < d; ++i) c.push_back(values.coordinate(i));

  for (std::size_t i = 0; i < v.size(); ++i) {
    sweep.advance(i);
    std::int64_t near = 0;
    if (d == 3) {
      const auto* c0 = c[0].data();
      const auto* c1 = c[1].data();
      const auto* c2 = c[2].data();
      const std::int32_t a0 = c0[i], a1 = c1[i], a2 = c2[i];
      for (std::size_t j = sweep.lo; j < sweep.hi; ++j) {
        near += static_cast<std::int64_t>(close_u32(c0[j], a0, reach, span) |
                                          close_u32(c1[j], a1, reach, span) |
                                          close_u32(c2[j], a2, reach, span));
      }
    } else {
      for (std::size_t j = sweep.lo; j < sweep.hi; ++j) {
        bool any = false;
        for (int k = 0; k < d && !any; ++k) any = close_u32(c[static_cast<std::size_t>(k)][j],
                                                            c[static_cast<std::size_t>(k)][i],
                                                            reach, span);
        near += any ? 1 : 0;
      }
    }
    out.total += static_cast<std::int64_t>(sweep.hi - sweep.lo);
    out.near += near;
    if (self_in_window) {
      // the self pair is inside [lo, hi) and trivially near-diagonal
      --out.total;
      --out.near;
    }
  }
  out.fraction = out.total > 0 ? static_cast<double>(out.near) / static_cast<double>(out.total) : 0.0;
  return out;
}

NearDiagonalCount near_diagonal_count(const Form& form, double T, const Window& window,
                                      double theta, const EnumerationOptions& opts) {
  const double bound = 1.0 / degree(form);
  if (!(theta >= 0 && theta < bound)) {
    std::ostringstream msg;
    msg << "near_diagonal_count needs 0 <= theta < " << bound << ", got " << theta;
    throw ConfigError(msg.str());
  }
  auto o = opts;
  o.retain_points = true;
  return near_diagonal_count(enumerate_values(form, T, o), window, theta);
}

}  // namespace diagpc
