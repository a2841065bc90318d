#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

extern "C" {
#include <quadmath.h>
}

#include "diagpc/analytic.hpp"
#include "diagpc/errors.hpp"

using namespace diagpc;

namespace {

BoxInterval iv(double lo, double hi) { return {(lo + hi) / 2, (hi - lo) / 2}; }

BoxPair desk_boxes(int n) {
  BoxPair b;
  b.degree = 2;
  b.T = 1e4;
  b.I = {iv(1, n), iv(1, n), iv(n + 4, 2 * n + 3)};
  b.J = {iv(n + 2, 2 * n + 1), iv(n + 2, 2 * n + 1), iv(1, n)};
  return b;
}

/// sum of base^{it} in quad precision.
struct QuadPhaseSum {
  __float128 re = 0, im = 0;
  void add(__float128 base, __float128 t, __float128 w = 1) {
    const __float128 ph = t * logq(base);
    re += w * cosq(ph);
    im += w * sinq(ph);
  }
  Complex value() const { return {static_cast<double>(re), static_cast<double>(im)}; }
};

}  // namespace

TEST_CASE("dirichlet sum against a quad precision oracle") {
  const auto r = dirichlet_sum(1, 1000, 50.0);
  QuadPhaseSum q;
  for (int k = 1; k <= 1000; ++k) q.add(k, 50);
  CHECK(r.terms == 1000);
  CHECK(std::abs(r.value - q.value()) < 1e-9);
  CHECK(dirichlet_sum(1, 1000, 0.0).value == Complex(1000, 0));
  CHECK_THROWS_AS(dirichlet_sum(0, 5, 1.0), ConfigError);
}

TEST_CASE("grid evaluation tracks direct evaluation") {
  std::vector<double> logs;
  for (int k = 1; k <= 300; ++k) logs.push_back(std::log(k * 1.7));
  const DirichletPolynomial p(logs);
  const double h = 0.37;
  const auto g = p.on_grid(h, 500);
  const auto g2 = p.on_grid(3.0, h, 50);
  for (std::size_t i = 0; i < g.size(); i += 7) CHECK(std::abs(g[i] - p(i * h)) < 1e-9);
  for (std::size_t i = 0; i < g2.size(); ++i) CHECK(std::abs(g2[i] - p(3.0 + i * h)) < 1e-9);
  const DirichletPolynomial w(std::vector<double>{0.0, 1.0}, std::vector<double>{2.0, -0.5});
  CHECK(w.weight_sum() == 1.5);
  CHECK(w(0.0) == Complex(1.5, 0.0));
}

TEST_CASE("S1 and S2 at t = 0 count their terms") {
  const auto b = desk_boxes(4);
  CHECK(s1_quadratic(b, 0.7, 0.1, 0.0) == Complex(256, 0));
  CHECK(s2_quadratic(b.I[2], b.J[2], 0.0) == Complex(16, 0));
}

TEST_CASE("conjugate symmetry in t") {
  const auto b = desk_boxes(4);
  const auto a = s1_quadratic(b, 0.7, 0.1, 3.3);
  CHECK(std::abs(a - std::conj(s1_quadratic(b, 0.7, 0.1, -3.3))) < 1e-12);
  const auto s = s2_quadratic(b.I[2], b.J[2], 3.3);
  CHECK(std::abs(s - std::conj(s2_quadratic(b.I[2], b.J[2], -3.3))) < 1e-12);
}

TEST_CASE("S1 on 3x3 boxes against a quad precision oracle") {
  const auto b = desk_boxes(3);
  const double alpha = 0.7, xi = 0.1, t = 2.5;
  QuadPhaseSum q;
  for (int m1 = 1; m1 <= 3; ++m1)
    for (int m2 = 1; m2 <= 3; ++m2)
      for (int n1 = 5; n1 <= 7; ++n1)
        for (int n2 = 5; n2 <= 7; ++n2) {
          const __float128 base =
              (n1 * n1 - m1 * m1) + static_cast<__float128>(alpha) * (n2 * n2 - m2 * m2) + static_cast<__float128>(xi);
          q.add(base, t);
        }
  CHECK(std::abs(s1_quadratic(b, alpha, xi, t) - q.value()) < 1e-10);
}

TEST_CASE("nonpositive bases are a domain error") {
  auto b = desk_boxes(3);
  b.J[0] = iv(1, 3);
  b.J[1] = iv(1, 3);
  CHECK_THROWS_AS(s1_quadratic(b, 0.7, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(s2_quadratic(iv(1, 3), iv(2, 4), 1.0), DomainError);
}

TEST_CASE("factored S2 equals the direct sum") {
  const BoxInterval I = iv(31, 50), J = iv(1, 20);
  const double t = 7.3;
  CHECK(std::abs(s2_quadratic_factored(I, J, t) - s2_quadratic_direct(I, J, t)) < 1e-10);
  const auto gw = SmoothWindow::gaussian(0.6);
  CHECK(std::abs(s2_quadratic_factored(I, J, t, gw) - s2_quadratic_direct(I, J, t, gw)) < 1e-10);
  const auto bw = SmoothWindow::bump(0.5);
  CHECK(std::abs(s2_quadratic(I, J, t, bw) - s2_quadratic_direct(I, J, t, bw)) < 1e-10);
}

TEST_CASE("power sums on 3x3 boxes") {
  BoxPair b;
  b.degree = 3;
  b.I = {iv(1, 3), iv(1, 3), iv(8, 10)};
  b.J = {iv(5, 7), iv(5, 7), iv(1, 3)};
  const PowerForm f(3, {0.8, 0.6});
  const double t = 1.7;
  QuadPhaseSum q1, q2;
  for (int m1 = 1; m1 <= 3; ++m1)
    for (int m2 = 1; m2 <= 3; ++m2)
      for (int n1 = 5; n1 <= 7; ++n1)
        for (int n2 = 5; n2 <= 7; ++n2) {
          const __float128 base = (n1 * n1 * n1 - m1 * m1 * m1) +
                                  static_cast<__float128>(0.8) * (n2 * n2 * n2 - m2 * m2 * m2);
          q1.add(base, t);
        }
  for (int m = 8; m <= 10; ++m)
    for (int n = 1; n <= 3; ++n) q2.add(m * m * m - n * n * n, t);
  CHECK(std::abs(s1_power(b, f, t) - q1.value()) < 1e-10);
  CHECK(std::abs(s2_power(b.I[2], b.J[2], 3, t) - q2.value()) < 1e-10);
  CHECK(s2_power_terms(b.I[2], b.J[2], 3).size() == 9);
}

TEST_CASE("window shapes") {
  const auto g = SmoothWindow::gaussian(2.0);
  CHECK(g(0) == 1.0);
  CHECK(g(2.0) == doctest::Approx(std::exp(-0.5)));
  CHECK(g(g.cutoff()) < 1e-17);
  // transform against a fine Riemann sum of w(s) cos(ts)
  for (double t : {0.0, 0.3, 1.1}) {
    double acc = 0;
    const double ds = 1e-3;
    for (double s = -20; s <= 20; s += ds) acc += g(s) * std::cos(t * s) * ds;
    CHECK(g.transform(t) == doctest::Approx(acc).epsilon(1e-8));
  }
  const auto b = SmoothWindow::bump(0.25, 4.0);
  CHECK(b(0) == 1.0);
  CHECK(b(3.0) == 1.0);
  CHECK(b(4.0) == 0.0);
  CHECK(b(-3.5) == doctest::Approx(0.5));
  double prev = 1.0;
  for (double x = 3.0; x <= 4.0; x += 0.01) {
    CHECK(b(x) <= prev);
    CHECK(b(x) >= 0.0);
    prev = b(x);
  }
  CHECK_THROWS_AS(b.transform(1.0), ConfigError);
}

namespace {

/// Every S1 x S2 pair, long double.
long double brute_windowed_count(const BoxPair& b, double alpha, double xi, double c, double sigma,
                                 double B) {
  std::vector<long double> X, Y;
  for (auto m1 = b.I[0].first(); m1 <= b.I[0].last(); ++m1)
    for (auto m2 = b.I[1].first(); m2 <= b.I[1].last(); ++m2)
      for (auto n1 = b.J[0].first(); n1 <= b.J[0].last(); ++n1)
        for (auto n2 = b.J[1].first(); n2 <= b.J[1].last(); ++n2)
          X.push_back(std::log(static_cast<long double>(n1 * n1 - m1 * m1) +
                               static_cast<long double>(alpha) * (n2 * n2 - m2 * m2) + xi));
  for (auto m = b.I[2].first(); m <= b.I[2].last(); ++m)
    for (auto n = b.J[2].first(); n <= b.J[2].last(); ++n)
      Y.push_back(std::log(static_cast<long double>(m * m - n * n)));
  long double acc = 0;
  for (auto x : X)
    for (auto y : Y) {
      const long double s = B * (x - y - std::log(static_cast<long double>(c))) / sigma;
      acc += std::exp(-0.5L * s * s);
    }
  return acc;
}

}  // namespace

TEST_CASE("windowed pair count through the Fourier side") {
  const auto b = desk_boxes(6);
  const QuadraticForm f(0.7, 0.8);
  const auto w = SmoothWindow::gaussian();
  for (double B : {3.0, 30.0, 300.0}) {
    const auto r = windowed_pair_count_fourier(b, f, 0.1, w, B);
    const double oracle = static_cast<double>(brute_windowed_count(b, 0.7, 0.1, 0.8, 1.0, B));
    CHECK(r.direct == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(std::abs(r.integral - oracle) < 1e-6 * std::max(1.0, oracle));
    CHECK(r.step <= 2 * std::numbers::pi / w.cutoff() * B);
    CHECK(r.t_max == doctest::Approx(9 * B));
  }
}

TEST_CASE("single term inversion") {
  BoxPair b;
  b.degree = 2;
  b.I = {iv(1, 1), iv(1, 1), iv(3, 3)};
  b.J = {iv(2, 2), iv(2, 2), iv(1, 1)};
  // X = 3 + 3 alpha, Y = 8
  const QuadraticForm f(0.7, 0.8);
  const double B = 5.0;
  const auto r = windowed_pair_count_fourier(b, f, 0.0, SmoothWindow::gaussian(), B);
  const double L = std::log(3 + 3 * 0.7) - std::log(8.0) - std::log(0.8);
  CHECK(r.integral == doctest::Approx(std::exp(-0.5 * B * B * L * L)).epsilon(1e-9));
}

TEST_CASE("a far window gives a vanishing count") {
  const auto b = desk_boxes(4);
  const auto r = windowed_pair_count_fourier(b, QuadraticForm(0.7, 0.5), 40.0,
                                             SmoothWindow::gaussian(0.01), 1e4);
  CHECK(std::abs(r.integral) < 1e-6);
  CHECK(std::abs(r.direct) < 1e-12);
}

TEST_CASE("Fourier preconditions") {
  const auto b = desk_boxes(3);
  const QuadraticForm f(0.7, 0.8);
  CHECK_THROWS_AS(windowed_pair_count_fourier(b, f, 0.1, SmoothWindow::bump(0.5), 10), ConfigError);
  CHECK_THROWS_AS(windowed_pair_count_fourier(b, f, 0.1, SmoothWindow::gaussian(), 0), ConfigError);
  CHECK_THROWS_AS(main_remainder_split(b, f, 0.1, SmoothWindow::gaussian(), 1, 10, 3, 0), ConfigError);
}

TEST_CASE("main and remainder split") {
  const auto b = desk_boxes(5);
  const QuadraticForm f(0.7, 0.8);
  const auto same = main_remainder_split(b, f, 0.1, SmoothWindow::gaussian(), 20, 20, 4, 1);
  for (const auto& s : same.samples) {
    CHECK(std::abs(s.remainder) < 1e-6 * std::max(1.0, s.exact));
    CHECK(s.coefficient >= 0.5);
    CHECK(s.coefficient <= 1.0);
  }
  const auto split = main_remainder_split(b, f, 0.1, SmoothWindow::gaussian(), 200, 5, 6, 2);
  CHECK(split.samples.size() == 6);
  CHECK(split.main_mean > 0);
  CHECK(split.max_audit_difference < 1e-6 * std::max(1.0, split.main_mean * 200));
  for (const auto& s : split.samples) {
    CHECK(s.main == doctest::Approx(s.direct_main).epsilon(1e-6));
    CHECK(s.remainder == doctest::Approx(s.exact - s.main));
  }
  const auto again = main_remainder_split(b, f, 0.1, SmoothWindow::gaussian(), 200, 5, 6, 2);
  CHECK(again.relative_rms == split.relative_rms);
}

TEST_CASE("transform spec scales") {
  BoxPair b = desk_boxes(4);
  b.T = 1e6;
  const QuadraticForm f(0.7, 0.8);
  const auto s = transform_spec(f, b, 0.5);
  CHECK(s.B == doctest::Approx(0.8 * b.k0() / 0.5));
  CHECK(s.B0 == doctest::Approx(0.8 * b.k0() / 1e4));
  CHECK(s.step > 0);
}

TEST_CASE("alpha average of |S1|^2") {
  const auto b = desk_boxes(3);
  const auto zero = alpha_average_s1_sq(b, 0.1, 0.0, 1000);
  CHECK(zero.terms == 81);
  CHECK(zero.mean == doctest::Approx(81.0 * 81.0));
  CHECK(zero.envelope == 81.0 * 81.0);

  BoxPair one;
  one.degree = 2;
  one.I = {iv(1, 1), iv(1, 1), iv(3, 3)};
  one.J = {iv(2, 2), iv(2, 2), iv(1, 1)};
  const auto single = alpha_average_s1_sq(one, 0.0, 17.0, 1000);
  CHECK(single.mean == doctest::Approx(1.0));
  CHECK(single.std_error < 1e-12);

  const auto big = desk_boxes(6);
  const auto a10 = alpha_average_s1_sq(big, 0.1, 10.0, 1000, 3);
  const auto a100 = alpha_average_s1_sq(big, 0.1, 100.0, 1000, 3);
  CHECK(a100.mean < a10.mean);
  CHECK(a10.mean < 1296.0 * 1296.0);
  CHECK_THROWS_AS(alpha_average_s1_sq(big, 0.1, 10.0, 999), ConfigError);
}

TEST_CASE("sup decay of the one-dimensional sum") {
  const BoxInterval I = iv(201, 300), J = iv(1, 100);
  const std::vector<double> grid{0.0, 1.0, 10.0, 100.0};
  const auto table = s2_sup_decay(I, J, 2, grid);
  REQUIRE(table.normalized.size() == grid.size());
  CHECK(table.normalized[0] == doctest::Approx(1.0));
  for (double v : table.normalized) CHECK(v <= 1.0 + 1e-12);
  CHECK(table.normalized[3] < 0.9);
  const std::vector<double> x{1, 2, 4, 8}, y{8, 4, 2, 1};
  CHECK(log_log_slope(x, y) == doctest::Approx(-1.0));
}
