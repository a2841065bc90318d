#include "diagpc/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "diagpc/errors.hpp"
#include "diagpc/rng.hpp"

namespace diagpc {

SlabMeasure slab_measure(const SlabSpec& spec, SlabMethod method, std::uint64_t samples,
                         std::uint64_t seed) {
  const std::size_t n = spec.coeffs.size();
  if (n < 1) throw ConfigError("slab_measure needs at least one coefficient");
  if (!(spec.width > 0)) throw ConfigError("slab width must be positive");
  const double cube = std::pow(0.5, static_cast<double>(n));
  double cmax = 0.0;
  for (double c : spec.coeffs) cmax = std::max(cmax, std::abs(c));

  SlabMeasure out;
  out.method = method;
  out.bound = cmax > 0 ? std::min(cube, 2.0 * spec.width / cmax * cube * 2.0) : cube;

  if (method == SlabMethod::exact_1d) {
    if (n != 1) throw ConfigError("exact slab measure is one-dimensional only");
    const double c = spec.coeffs[0];
    if (c == 0.0) {
      out.measure = std::abs(spec.offset) < spec.width ? cube : 0.0;
      return out;
    }
    double lo = (-spec.width - spec.offset) / c;
    double hi = (spec.width - spec.offset) / c;
    if (lo > hi) std::swap(lo, hi);
    out.measure = std::max(0.0, std::min(hi, 1.0) - std::max(lo, 0.5));
    return out;
  }

  if (samples < 1) throw ConfigError("slab_measure needs samples");
  const CounterRng rng(seed, 0x736c6162ULL);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    double acc = spec.offset;
    for (std::size_t i = 0; i < n; ++i) acc += spec.coeffs[i] * rng.uniform(s * n + i, 0.5, 1.0);
    hits += std::abs(acc) < spec.width ? 1 : 0;
  }
  const double m = static_cast<double>(samples);
  const double p = static_cast<double>(hits) / m;
  out.samples = samples;
  out.measure = cube * p;
  out.std_error = cube * std::sqrt(p * (1.0 - p) / m);
  return out;
}

namespace {

using Histogram = std::vector<std::pair<std::int64_t, std::uint64_t>>;

/// |m^k - n^k| over ordered (m, n) in [1, M]^2 with lo <= |m - n| < hi.
Histogram difference_histogram(std::int64_t M, int k, std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> diffs;
  for (std::int64_t m = 1; m <= M; ++m) {
    for (std::int64_t n = 1; n <= M; ++n) {
      const std::int64_t gap = m > n ? m - n : n - m;
      if (gap < lo || gap >= hi) continue;
      const std::int64_t d = exact_power(m, k) - exact_power(n, k);
      diffs.push_back(d < 0 ? -d : d);
    }
  }
  std::sort(diffs.begin(), diffs.end());
  Histogram h;
  for (auto d : diffs) {
    if (!h.empty() && h.back().first == d) {
      ++h.back().second;
    } else {
      h.emplace_back(d, 1);
    }
  }
  return h;
}

/// sum over (d1, s) of c1 cnt(s) / (d1 + s), skipping d1 + s = 0.
double reciprocal_sum(const Histogram& first, const std::vector<double>& s_values,
                      const std::vector<double>& s_counts) {
  double total = 0.0;
  for (const auto& [d1, c1] : first) {
    const double d = static_cast<double>(d1);
    double inner = 0.0;
    for (std::size_t j = 0; j < s_values.size(); ++j) {
      const double den = d + s_values[j];
      if (den > 0) inner += s_counts[j] / den;
    }
    total += static_cast<double>(c1) * inner;
  }
  return total;
}

}  // namespace

ExcludedRegimeSum excluded_regime_sum(const PowerForm& form, double T, double theta) {
  const int k = form.k();
  if (!(theta > 0 && theta < 1.0 / k)) {
    std::ostringstream msg;
    msg << "excluded_regime_sum needs 0 < theta < " << 1.0 / k << ", got " << theta;
    throw ConfigError(msg.str());
  }
  if (!(T >= 1)) throw ConfigError("excluded_regime_sum needs T >= 1");
  const auto c = coefficients(Form{form});
  std::vector<std::int64_t> M;
  for (double a : c) M.push_back(static_cast<std::int64_t>(std::floor(std::pow(T / a, 1.0 / k) + 1e-9)));
  for (std::size_t i = 0; i < M.size(); ++i) {
    while (static_cast<double>(exact_power(M[i] + 1, k)) * c[i] <= T) ++M[i];
    while (M[i] > 0 && static_cast<double>(exact_power(M[i], k)) * c[i] > T) --M[i];
  }

  ExcludedRegimeSum out;
  out.T = T;
  out.theta = theta;
  out.reach = std::pow(T, 1.0 / k - theta);
  if (std::any_of(M.begin(), M.end(), [](std::int64_t m) { return m < 1; })) return out;

  // histogram of sum_{i >= 2} |m_i^k - n_i^k| over the remaining coordinates
  std::int64_t s_max = 0;
  for (std::size_t i = 1; i < M.size(); ++i) s_max += exact_power(M[i], k);
  if (s_max > 200'000'000) throw CapacityError("excluded_regime_sum: T too large for exact histograms");
  std::vector<std::uint64_t> rest(static_cast<std::size_t>(s_max) + 1, 0);
  rest[0] = 1;
  std::int64_t reach_so_far = 0;
  for (std::size_t i = 1; i < M.size(); ++i) {
    const auto h = difference_histogram(M[i], k, 0, M[i] + 1);
    std::vector<std::uint64_t> next(rest.size(), 0);
    for (std::int64_t s = 0; s <= reach_so_far; ++s) {
      const auto cs = rest[static_cast<std::size_t>(s)];
      if (cs == 0) continue;
      for (const auto& [d, cd] : h) next[static_cast<std::size_t>(s + d)] += cs * cd;
    }
    reach_so_far += exact_power(M[i], k);
    rest.swap(next);
  }
  std::vector<double> s_values, s_counts;
  std::uint64_t rest_pairs = 0;
  double diag = 0.0;
  for (std::size_t s = 0; s < rest.size(); ++s) {
    if (rest[s] == 0) continue;
    s_values.push_back(static_cast<double>(s));
    s_counts.push_back(static_cast<double>(rest[s]));
    rest_pairs += rest[s];
    if (s > 0) diag += static_cast<double>(rest[s]) / static_cast<double>(s);
  }

  const auto reach_int = static_cast<std::int64_t>(std::ceil(out.reach));
  const auto main_hist = difference_histogram(M[0], k, 1, reach_int);
  const auto all_hist = difference_histogram(M[0], k, 0, M[0] + 1);
  std::uint64_t main_first = 0;
  for (const auto& e : main_hist) main_first += e.second;

  out.main = reciprocal_sum(main_hist, s_values, s_counts) / T;
  out.main_pairs = main_first * rest_pairs;
  out.diagonal = static_cast<double>(M[0]) * diag / T;
  out.diagonal_pairs = static_cast<std::uint64_t>(M[0]) * (rest_pairs - 1);
  out.all_pairs = reciprocal_sum(all_hist, s_values, s_counts) / T;
  return out;
}

SeparationReport separation_audit(const BoxPair& boxes, double T, double eps) {
  SeparationReport r;
  const int deg = boxes.degree;
  const int d = boxes.dimension();
  auto fail = [&](std::string why) {
    r.passed = false;
    r.failures.push_back(std::move(why));
  };
  if (d < 1 || static_cast<int>(boxes.J.size()) != d) {
    fail("box pair is empty or unbalanced");
    return r;
  }
  r.separation_floor = std::pow(T, 1.0 / deg - eps);
  r.k0_floor = std::pow(T, 1.0 - deg * eps);
  r.corner_scale = std::pow(T, 1.0 - 3.0 * eps);
  r.corner_constant = 2.0 * deg * std::pow(2.0, deg - 1) + 1.0;

  r.min_separation = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i) {
    const auto& I = boxes.I[static_cast<std::size_t>(i)];
    const auto& J = boxes.J[static_cast<std::size_t>(i)];
    const double sep = std::abs(I.center - J.center);
    r.min_separation = std::min(r.min_separation, sep);
    if (!(sep > r.separation_floor)) {
      std::ostringstream msg;
      msg << "coordinate " << i << ": center separation " << sep << " <= " << r.separation_floor;
      fail(msg.str());
    }
  }

  r.k0 = boxes.k0();
  if (!(r.k0 > r.k0_floor)) {
    std::ostringstream msg;
    msg << "k0 = " << r.k0 << " <= " << r.k0_floor;
    fail(msg.str());
  }

  const auto& I = boxes.I.back();
  const auto& J = boxes.J.back();
  for (double x : {I.lo(), I.hi()}) {
    for (double y : {J.lo(), J.hi()}) {
      const double v = std::abs(std::pow(x, deg) - std::pow(y, deg) - r.k0);
      r.corner_max = std::max(r.corner_max, v);
    }
  }
  r.corner_ratio = r.corner_max / r.corner_scale;
  if (!(r.corner_ratio <= r.corner_constant)) {
    std::ostringstream msg;
    msg << "corner deviation " << r.corner_max << " exceeds " << r.corner_constant << " x "
        << r.corner_scale;
    fail(msg.str());
  }
  return r;
}

}  // namespace diagpc
