#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "diagpc/errors.hpp"
#include "diagpc/forms.hpp"
#include "diagpc/rng.hpp"

using namespace diagpc;

TEST_CASE("quadratic evaluation") {
  const std::int64_t p[] = {1, 2, 3};
  CHECK(evaluate(QuadraticForm(0.5, 0.5), p) == 7.5);
  const std::int64_t zero[] = {0, 0, 0};
  CHECK(evaluate(QuadraticForm(0.73, 0.61), zero) == 0.0);
}

TEST_CASE("power evaluation") {
  const std::int64_t ones[] = {1, 1, 1};
  CHECK(evaluate(PowerForm(3, {1.0, 1.0}), ones) == 3.0);
  const std::int64_t p[] = {2, 1, 1};
  CHECK(evaluate(PowerForm(3, {0.5, 0.5}), p) == 9.0);
}

TEST_CASE("unit coefficients give exact integers below 2^53") {
  const PowerForm f(3, {1.0, 1.0});
  const std::int64_t p[] = {150000, 149999, 3};
  const std::int64_t expect = 150000LL * 150000 * 150000 + 149999LL * 149999 * 149999 + 27;
  CHECK(evaluate(f, p) == static_cast<double>(expect));
}

TEST_CASE("evaluation rounding stays within 4 ulp of a long double reference") {
  const CounterRng rng(11, 0);
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const double a = rng.uniform(4 * s, 0.5, 1.0);
    const double b = rng.uniform(4 * s + 1, 0.5, 1.0);
    const std::int64_t x[] = {static_cast<std::int64_t>(rng.uniform(4 * s + 2) * 3e4),
                              static_cast<std::int64_t>(rng.uniform(4 * s + 3) * 3e4), 17};
    const long double ref = static_cast<long double>(x[0]) * x[0] +
                            static_cast<long double>(a) * x[1] * x[1] +
                            static_cast<long double>(b) * x[2] * x[2];
    const double v = evaluate(QuadraticForm(a, b), x);
    const double ulp = std::nextafter(v, INFINITY) - v;
    CHECK(std::abs(static_cast<long double>(v) - ref) <= 4.0L * ulp);
  }
}

TEST_CASE("evaluation is monotone in each coordinate") {
  const PowerForm f(4, {0.6, 0.9, 0.55});
  std::int64_t x[] = {3, 5, 7, 2};
  double prev = evaluate(f, x);
  for (int i = 0; i < 4; ++i) {
    for (int step = 0; step < 5; ++step) {
      ++x[i];
      const double v = evaluate(f, x);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("coefficients outside [1/2, 1] and k < 3 are rejected") {
  CHECK_THROWS_AS(QuadraticForm(0.49, 0.7), ConfigError);
  CHECK_THROWS_AS(QuadraticForm(0.7, 1.01), ConfigError);
  CHECK_THROWS_AS(PowerForm(2, {0.7}), ConfigError);
  CHECK_THROWS_AS(PowerForm(3, {0.7}), ConfigError);
  CHECK_THROWS_AS(PowerForm(3, {0.7, 0.3}), ConfigError);
}

TEST_CASE("power overflow is an explicit capacity error") {
  const PowerForm f(5, {1.0, 1.0, 1.0, 1.0});
  const std::int64_t x[] = {2000, 1, 1, 1, 1};  // 2000^5 = 3.2e16 > 2^53
  CHECK_THROWS_AS(evaluate(f, x), CapacityError);
  CHECK_THROWS_AS(exact_power(3'000'000'000LL, 2), CapacityError);
  CHECK(exact_power(94906265, 2) == 94906265LL * 94906265LL);
}

TEST_CASE("window fields") {
  const Window w(-0.25, 0.75);
  CHECK(w.xi() == 0.25);
  CHECK(w.delta() == 0.5);
  CHECK(w.contains(-0.25));
  CHECK_FALSE(w.contains(0.75));
  CHECK_THROWS_AS(Window(1.0, 1.0), ConfigError);
  const auto c = Window::centered(0.5, 0.2);
  CHECK(c.a() == doctest::Approx(0.4));
  CHECK(c.b() == doctest::Approx(0.6));
}

TEST_CASE("parameter samples are in range and reproducible") {
  const auto s1 = sample_parameters(7, 3, SampleMode::quadratic());
  const auto s2 = sample_parameters(7, 3, SampleMode::quadratic());
  REQUIRE(s1.forms.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto c1 = coefficients(s1.forms[i]);
    const auto c2 = coefficients(s2.forms[i]);
    CHECK(c1 == c2);
    for (std::size_t j = 1; j < c1.size(); ++j) {
      CHECK(c1[j] >= 0.5);
      CHECK(c1[j] <= 1.0);
    }
  }
  const auto p = sample_parameters(7, 4, SampleMode::power(5));
  CHECK(dimension(p.forms[0]) == 5);
  CHECK(coefficients(p.forms[3]).size() == 5);
}

TEST_CASE("sampled coefficient mean matches the uniform law") {
  const std::size_t n = 10000;
  const auto s = sample_parameters(7, n, SampleMode::quadratic());
  double sum = 0.0;
  for (const auto& f : s.forms) sum += coefficients(f)[1];
  const double mean = sum / n;
  const double sigma = (1.0 / std::sqrt(12.0)) * 0.5 / 100.0;
  CHECK(std::abs(mean - 0.75) < 3 * sigma);
}

TEST_CASE("counter rng is a pure function of seed, stream and counter") {
  const CounterRng a(5, 9), b(5, 9), c(5, 10);
  CHECK(a.bits(123) == b.bits(123));
  CHECK(a.bits(123) != c.bits(123));
  CHECK(a.bits(123) != a.bits(124));
  RngStream s(5, 9);
  CHECK(s.uniform() == a.uniform(0));
  CHECK(s.uniform() == a.uniform(1));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = a.uniform(i);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
