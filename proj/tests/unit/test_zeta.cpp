#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "diagpc/errors.hpp"
#include "diagpc/zeta.hpp"

using namespace diagpc;

namespace {

struct Ref {
  double t, re, im;
};

// 30-digit reference values
const Ref kRefs[] = {
    {10.0, 1.5448952202967527669, -0.11533646527127337544},
    {50.0, -0.081712108320979975048, 0.33079219403866129559},
    {100.0, 2.6926198856813240905, -0.020386029602598161771},
    {1000.0, 0.35633436719439605507, 0.93199783123299366512},
    {10000.0, -0.33937380263883445757, -0.037091505973206031474},
    {99999.5, 2.0932412983850437973, 1.6395033255833794078},
};

}  // namespace

TEST_CASE("zeta on the critical line against reference values") {
  for (const auto& r : kRefs) {
    const auto z = zeta_half_line(r.t);
    CHECK(std::abs(z - std::complex<double>(r.re, r.im)) < 1e-9);
    if (r.t <= kEtaMaxT) CHECK(std::abs(zeta_half_line_eta(r.t) - std::complex<double>(r.re, r.im)) < 1e-9);
  }
  CHECK(zeta_half_line(0.0).real() == doctest::Approx(-1.4603545088095868).epsilon(1e-10));
  CHECK(std::abs(zeta_half_line(14.134725141734693)) < 1e-8);
}

TEST_CASE("two independent evaluations agree") {
  for (double t = 0.5; t <= 200.0; t += 3.7) {
    CHECK(std::abs(zeta_half_line(t) - zeta_half_line_eta(t)) < 1e-9);
  }
}

TEST_CASE("conjugate symmetry") {
  for (double t : {3.0, 77.7, 5000.0}) {
    CHECK(std::abs(zeta_half_line(-t) - std::conj(zeta_half_line(t))) < 1e-12);
  }
}

TEST_CASE("range limits") {
  CHECK_THROWS_AS(zeta_half_line(1.0001e5), DomainError);
  CHECK_THROWS_AS(zeta_half_line_eta(251.0), DomainError);
  CHECK(zeta_remainder_bound(100.0, 200) < zeta_remainder_bound(100.0, 50));
}

TEST_CASE("fourth moment integral") {
  const auto r = zeta_fourth_moment(100.0);
  CHECK(r.integral == doctest::Approx(2391.83858283368).epsilon(1e-8));
  CHECK(r.error_estimate < 1e-6 * r.integral);
  const double ts[] = {50.0, 100.0, 200.0};
  const auto sweep = zeta_fourth_moment_sweep(ts);
  REQUIRE(sweep.size() == 3);
  CHECK(sweep[1].integral == doctest::Approx(r.integral).epsilon(1e-10));
  CHECK(sweep[0].integral < sweep[1].integral);
  CHECK(sweep[1].integral < sweep[2].integral);
  CHECK(sweep[2].fit_exponent > 1.0);
  const double bad[] = {100.0, 50.0};
  CHECK_THROWS_AS(zeta_fourth_moment_sweep(bad), ConfigError);
  CHECK_THROWS_AS(zeta_fourth_moment(2000.0), DomainError);
}

namespace {

/// Composite Simpson in long double over a fine uniform grid.
long double simpson_dyadic(int K, int ell, int panels) {
  const long double a = std::ldexp(1.0L, ell), b = 2 * a;
  const long double h = (b - a) / panels;
  auto f = [K](long double t) {
    long double re = 0, im = 0;
    for (int k = 1; k <= K; ++k) {
      const long double ph = t * std::log(static_cast<long double>(k));
      re += std::cos(ph);
      im += std::sin(ph);
    }
    const long double m = re * re + im * im;
    return m * m;
  };
  long double acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4 : 2) * f(a + i * h);
  return acc * h / 3 / a;
}

}  // namespace

TEST_CASE("dyadic Dirichlet fourth moment") {
  CHECK(dirichlet_fourth_moment_dyadic(1, 4).value == doctest::Approx(1.0).epsilon(1e-12));
  for (auto [K, ell] : {std::pair{5, 3}, std::pair{12, 5}, std::pair{30, 2}}) {
    const auto r = dirichlet_fourth_moment_dyadic(K, ell);
    const double oracle = static_cast<double>(simpson_dyadic(K, ell, 20000));
    CHECK(r.value == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(r.value <= std::pow(K, 4.0));
    CHECK(r.normalized == doctest::Approx(r.value / (double(K) * K)));
    CHECK(std::abs(r.refined - r.value) <= 1e-8 * r.value);
  }
  CHECK_THROWS_AS(dirichlet_fourth_moment_dyadic(1001, 3), DomainError);
  CHECK_THROWS_AS(dirichlet_fourth_moment_dyadic(10, 13), DomainError);
}

TEST_CASE("long intervals approach the diagonal sum") {
  const int K = 3;
  std::map<int, int> r;
  for (int a = 1; a <= K; ++a)
    for (int b = 1; b <= K; ++b) ++r[a * b];
  double diag = 0;
  for (auto [m, c] : r) diag += double(c) * c;
  const auto v = dirichlet_fourth_moment_dyadic(K, 12);
  CHECK(v.value == doctest::Approx(diag).epsilon(0.02));
}
