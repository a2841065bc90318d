#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "diagpc/errors.hpp"
#include "diagpc/lattice.hpp"
#include "diagpc/reductions.hpp"

using namespace diagpc;

TEST_CASE("one-dimensional slabs") {
  const auto m = slab_measure({{2.0}, -1.5, 0.1}, SlabMethod::exact_1d);
  CHECK(m.measure == doctest::Approx(0.1));
  CHECK(m.bound == doctest::Approx(0.1));
  CHECK(slab_measure({{0.0}, 0.3, 0.1}, SlabMethod::exact_1d).measure == 0.0);
  CHECK(slab_measure({{0.0}, 0.05, 0.1}, SlabMethod::exact_1d).measure == 0.5);
  CHECK(slab_measure({{1.0}, 5.0, 0.1}, SlabMethod::exact_1d).measure == 0.0);
  CHECK_THROWS_AS(slab_measure({{1.0, 1.0}, 0.0, 0.1}, SlabMethod::exact_1d), ConfigError);
  CHECK_THROWS_AS(slab_measure({{1.0}, 0.0, 0.0}, SlabMethod::exact_1d), ConfigError);
}

TEST_CASE("two-dimensional slab against the polygon area") {
  // |alpha_1 - alpha_2| < 1/8 in [1/2, 1]^2: square minus two corner triangles
  const double leg = 0.5 - 0.125;
  const double area = 0.25 - leg * leg;
  CHECK(area == 0.109375);
  const auto m = slab_measure({{4.0, -4.0}, 0.0, 0.5}, SlabMethod::monte_carlo, 1'000'000, 3);
  CHECK(std::abs(m.measure - area) <= 3 * m.std_error);
  CHECK(m.samples == 1'000'000);
  CHECK(m.measure <= m.bound + 3 * m.std_error);
}

TEST_CASE("monte carlo slab agrees with the exact 1-d value") {
  const SlabSpec s{{3.0}, -2.2, 0.2};
  const auto exact = slab_measure(s, SlabMethod::exact_1d);
  const auto mc = slab_measure(s, SlabMethod::monte_carlo, 400'000, 1);
  CHECK(std::abs(mc.measure - exact.measure) <= 4 * mc.std_error);
}

TEST_CASE("slab measure properties") {
  const std::vector<double> c{1.5, -0.7, 2.0};
  double prev = 0;
  for (double w : {0.01, 0.1, 0.3, 1.0, 10.0}) {
    const auto m = slab_measure({c, -1.2, w}, SlabMethod::monte_carlo, 200'000, 9);
    CHECK(m.measure >= prev);
    CHECK(m.measure <= 0.125);
    prev = m.measure;
    const auto neg = slab_measure({{-1.5, 0.7, -2.0}, 1.2, w}, SlabMethod::monte_carlo, 200'000, 9);
    CHECK(neg.measure == m.measure);
  }
  CHECK(prev == 0.125);
  for (double w : {0.05, 0.4}) {
    const auto e = slab_measure({{-1.7}, 1.2, w}, SlabMethod::exact_1d);
    CHECK(e.measure == doctest::Approx(slab_measure({{1.7}, -1.2, w}, SlabMethod::exact_1d).measure));
    CHECK(e.measure <= e.bound + 1e-15);
  }
}

namespace {

struct Brute {
  double main = 0, diagonal = 0, all = 0;
};

Brute brute_excluded(const PowerForm& f, double T, double theta) {
  const int k = f.k();
  const auto c = coefficients(Form{f});
  std::vector<std::vector<std::int64_t>> pts;
  std::vector<std::int64_t> M;
  for (double a : c) {
    std::int64_t m = 0;
    while (a * std::pow(double(m + 1), k) <= T) ++m;
    M.push_back(m);
  }
  std::vector<std::int64_t> x(M.size(), 1);
  for (;;) {
    pts.push_back(x);
    std::size_t i = x.size();
    while (i > 0 && x[i - 1] == M[i - 1]) x[--i] = 1;
    if (i == 0) break;
    ++x[i - 1];
  }
  const double reach = std::pow(T, 1.0 / k - theta);
  Brute b;
  for (const auto& p : pts) {
    for (const auto& q : pts) {
      if (p == q) continue;
      double s = 0;
      for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(std::pow(double(p[i]), k) - std::pow(double(q[i]), k));
      const double v = 1.0 / s / T;
      b.all += v;
      const auto gap = std::abs(p[0] - q[0]);
      if (gap == 0) b.diagonal += v;
      if (gap >= 1 && gap < reach) b.main += v;
    }
  }
  return b;
}

}  // namespace

TEST_CASE("excluded regime sum against all pairs") {
  const PowerForm f(3, {0.7, 0.8});
  for (double theta : {0.05, 0.1, 0.2}) {
    const auto r = excluded_regime_sum(f, 300, theta);
    const auto b = brute_excluded(f, 300, theta);
    CHECK(r.main == doctest::Approx(b.main).epsilon(1e-10));
    CHECK(r.diagonal == doctest::Approx(b.diagonal).epsilon(1e-10));
    CHECK(r.all_pairs == doctest::Approx(b.all).epsilon(1e-10));
  }
  const auto b4 = brute_excluded(PowerForm(4, {0.6, 0.9, 0.75}), 500, 0.1);
  const auto r4 = excluded_regime_sum(PowerForm(4, {0.6, 0.9, 0.75}), 500, 0.1);
  CHECK(r4.all_pairs == doctest::Approx(b4.all).epsilon(1e-10));
  CHECK(r4.main == doctest::Approx(b4.main).epsilon(1e-10));
}

TEST_CASE("excluded regime properties") {
  const PowerForm f(3, {0.7, 0.8});
  CHECK(excluded_regime_sum(f, 2, 0.1).main == 0.0);
  double prev = INFINITY;
  for (double theta : {0.02, 0.1, 0.2, 0.3}) {
    const auto r = excluded_regime_sum(f, 2e4, theta);
    CHECK(r.all_pairs >= r.main + r.diagonal);
    CHECK(r.main <= prev);
    prev = r.main;
  }
  CHECK_THROWS_AS(excluded_regime_sum(f, 100, 0.34), ConfigError);
  CHECK_THROWS_AS(excluded_regime_sum(f, 100, 0.0), ConfigError);
}

TEST_CASE("separation audit") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto b = box_localize(QuadraticForm(0.9, 0.6), 1e6, 0.02, seed);
    const auto r = separation_audit(b, 1e6, 0.02);
    CHECK(r.passed);
    CHECK(r.corner_constant == 9.0);
    CHECK(r.corner_ratio <= r.corner_constant);
    CHECK(r.k0 > r.k0_floor);
  }
  const auto p = box_localize(PowerForm(3, {0.7, 0.8}), 1e9, 0.03, 1);
  CHECK(separation_audit(p, 1e9, 0.03).passed);

  auto bad = box_localize(QuadraticForm(0.9, 0.6), 1e6, 0.02, 0);
  bad.J[0].center = bad.I[0].center;
  const auto r = separation_audit(bad, 1e6, 0.02);
  CHECK_FALSE(r.passed);
  REQUIRE(!r.failures.empty());
  CHECK(r.failures[0].find("coordinate 0") != std::string::npos);
}
