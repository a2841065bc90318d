#include "diagpc/zeta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "diagpc/analytic.hpp"
#include "diagpc/errors.hpp"
#include "diagpc/summation.hpp"

namespace diagpc {

namespace {

using C = std::complex<double>;

constexpr int kCorrections = 6;
constexpr double kRemainderTarget = 1e-10;

// B_2, B_4, ..., B_14
constexpr std::array<double, 7> kBernoulli = {1.0 / 6,    -1.0 / 30,  1.0 / 42, -1.0 / 30,
                                              5.0 / 66,   -691.0 / 2730, 7.0 / 6};

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Correction terms j = 1 .. M + 1 of the Euler-Maclaurin tail at cutoff n.
std::array<C, kCorrections + 1> corrections(C s, double n) {
  std::array<C, kCorrections + 1> out{};
  const C n_pow = std::exp(-s * std::log(n));  // n^{-s}
  C rising = s;                                // s (s+1) ... (s + 2j - 2)
  double n_inv = 1.0 / n;                      // n^{-(2j-1)}
  for (int j = 1; j <= kCorrections + 1; ++j) {
    if (j > 1) {
      rising *= (s + static_cast<double>(2 * j - 3)) * (s + static_cast<double>(2 * j - 2));
      n_inv /= n * n;
    }
    out[static_cast<std::size_t>(j - 1)] =
        kBernoulli[static_cast<std::size_t>(j - 1)] / factorial(2 * j) * rising * n_pow * n_inv;
  }
  return out;
}

std::int64_t initial_cutoff(double t) {
  return std::max<std::int64_t>(
      20, static_cast<std::int64_t>(std::ceil(2.0 + std::abs(t) / (2.0 * std::numbers::pi))));
}

}  // namespace

double zeta_remainder_bound(double t, std::int64_t n) {
  const C s(0.5, t);
  const auto c = corrections(s, static_cast<double>(n));
  const double order = 2.0 * kCorrections + 1.0;
  return std::abs(s + order) / (0.5 + order) * std::abs(c[kCorrections]);
}

std::complex<double> zeta_half_line(double t) {
  if (!(std::abs(t) <= kZetaMaxT)) {
    std::ostringstream msg;
    msg << "zeta_half_line: |t| = " << std::abs(t) << " exceeds the accuracy envelope " << kZetaMaxT;
    throw DomainError(msg.str());
  }
  const C s(0.5, t);
  std::int64_t n = initial_cutoff(t);
  while (zeta_remainder_bound(t, n) > kRemainderTarget) n += n / 2;
  CompensatedComplexSum sum;
  for (std::int64_t k = 1; k < n; ++k) {
    const double lk = std::log(static_cast<double>(k));
    const double mag = 1.0 / std::sqrt(static_cast<double>(k));
    sum.add({mag * std::cos(t * lk), -mag * std::sin(t * lk)});
  }
  const double nd = static_cast<double>(n);
  const C n_pow = std::exp(-s * std::log(nd));
  sum.add(n_pow * nd / (s - 1.0));
  sum.add(0.5 * n_pow);
  const auto c = corrections(s, nd);
  for (int j = 0; j < kCorrections; ++j) sum.add(c[static_cast<std::size_t>(j)]);
  return sum.value();
}

std::complex<double> zeta_half_line_eta(double t) {
  if (!(std::abs(t) <= kEtaMaxT)) {
    std::ostringstream msg;
    msg << "zeta_half_line_eta: |t| = " << std::abs(t) << " exceeds " << kEtaMaxT;
    throw DomainError(msg.str());
  }
  const C s(0.5, t);
  // error <= 3 (1 + 2|t|) / ((3 + sqrt 8)^n |Gamma(s)|), |Gamma(1/2 + it)|^2 = pi / cosh(pi t)
  const double log_inv_gamma = 0.5 * (std::log(std::cosh(std::numbers::pi * t)) - std::log(std::numbers::pi));
  const double log_needed = std::log(3.0 * (1.0 + 2.0 * std::abs(t))) + log_inv_gamma + std::log(1e14);
  const int n = static_cast<int>(std::ceil(log_needed / std::log(3.0 + std::sqrt(8.0)))) + 1;
  // term_i = n (n + i - 1)! 4^i / ((n - i)! (2i)!), up to a common factor
  std::vector<long double> term(static_cast<std::size_t>(n) + 1);
  term[0] = 1.0L;
  for (int i = 1; i <= n; ++i) {
    term[static_cast<std::size_t>(i)] = term[static_cast<std::size_t>(i - 1)] * 4.0L *
                                        (n + i - 1) * (n - i + 1) /
                                        (static_cast<long double>(2 * i) * (2 * i - 1));
  }
  // tail_k = sum_{i > k} term_i, so d_n - d_k in the usual notation
  std::vector<long double> tail(static_cast<std::size_t>(n) + 1, 0.0L);
  for (int k = n - 1; k >= 0; --k) {
    tail[static_cast<std::size_t>(k)] =
        tail[static_cast<std::size_t>(k + 1)] + term[static_cast<std::size_t>(k + 1)];
  }
  const long double d_n = tail[0] + term[0];
  CompensatedComplexSum sum;
  for (int k = 0; k < n; ++k) {
    const double w = static_cast<double>(tail[static_cast<std::size_t>(k)] / d_n);
    const double lk = std::log(static_cast<double>(k + 1));
    const double mag = (k % 2 == 0 ? w : -w) / std::sqrt(static_cast<double>(k + 1));
    sum.add({mag * std::cos(t * lk), -mag * std::sin(t * lk)});
  }
  const C eta = sum.value();
  const C factor = 1.0 - std::exp((1.0 - s) * std::numbers::ln2);
  return eta / factor;
}

namespace {

constexpr double kPanel = 0.05;

double zeta_fourth(double t) {
  const double n = std::norm(zeta_half_line(t));
  return n * n;
}

struct PanelSum {
  CompensatedSum value;
  double error = 0.0;
};

void integrate_panels(double a, double b, PanelSum& acc) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  const auto panels = static_cast<std::int64_t>(std::ceil((b - a) / kPanel - 1e-9));
  const double w = (b - a) / static_cast<double>(panels);
  for (std::int64_t p = 0; p < panels; ++p) {
    const double lo = a + static_cast<double>(p) * w;
    const double hi = p + 1 == panels ? b : lo + w;
    double err = 0.0;
    const double v = GK::integrate(zeta_fourth, lo, hi, 0, 0.0, &err);
    if (!std::isfinite(v) || err > 1e-8 * std::max(1.0, std::abs(v))) {
      std::ostringstream msg;
      msg << "zeta fourth moment: panel [" << lo << ", " << hi << "] error estimate " << err;
      throw NumericalAuditError(msg.str());
    }
    acc.value.add(v);
    acc.error += err;
  }
}

}  // namespace

std::vector<ZetaMomentResult> zeta_fourth_moment_sweep(std::span<const double> t_stars) {
  std::vector<ZetaMomentResult> out;
  PanelSum acc;
  double prev = 1.0;
  for (double ts : t_stars) {
    if (!(ts > prev || (out.empty() && ts > 1.0))) {
      throw ConfigError("zeta_fourth_moment needs increasing t* > 1");
    }
    if (ts > 1e3) throw DomainError("zeta_fourth_moment is limited to t* <= 1000");
    integrate_panels(prev, ts, acc);
    out.push_back({ts, acc.value.value(), acc.error, 0.0});
    prev = ts;
  }
  if (out.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& r : out) {
      x.push_back(r.t_star);
      y.push_back(r.integral);
    }
    const double slope = log_log_slope(x, y);
    for (auto& r : out) r.fit_exponent = slope;
  }
  return out;
}

ZetaMomentResult zeta_fourth_moment(double t_star) {
  const double ts[] = {t_star};
  return zeta_fourth_moment_sweep(ts).front();
}

namespace {

/// 2^-ell times the composite 8-point Gauss-Legendre integral with `panels` panels.
double dyadic_quadrature(const DirichletPolynomial& poly, double a, double b, std::int64_t panels) {
  using GL = boost::math::quadrature::gauss<double, 8>;
  const auto& abscissa = GL::abscissa();  // nonnegative half, 4 entries
  const auto& weight = GL::weights();
  const double w = (b - a) / static_cast<double>(panels);
  const auto count = static_cast<std::size_t>(panels);
  CompensatedSum total;
  auto add_node = [&](double x, double wt) {
    const auto vals = poly.on_grid(a + 0.5 * w * (1.0 + x), w, count);
    CompensatedSum s;
    for (const auto& z : vals) {
      const double n = std::norm(z);
      s.add(n * n);
    }
    total.add(wt * s.value());
  };
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    add_node(abscissa[i], weight[i]);
    if (abscissa[i] != 0.0) add_node(-abscissa[i], weight[i]);
  }
  return 0.5 * w * total.value() / (b - a);
}

}  // namespace

DyadicMomentResult dirichlet_fourth_moment_dyadic(std::int64_t K, int ell) {
  if (!(K >= 1 && K <= 1000)) throw DomainError("dirichlet_fourth_moment_dyadic needs 1 <= K <= 1000");
  if (!(ell >= 0 && ell <= 12)) throw DomainError("dirichlet_fourth_moment_dyadic needs 0 <= ell <= 12");
  std::vector<double> logs;
  for (std::int64_t k = 1; k <= K; ++k) logs.push_back(std::log(static_cast<double>(k)));
  const DirichletPolynomial poly(std::move(logs));
  const double a = std::exp2(ell);
  const double b = 2.0 * a;
  const double width = K > 1 ? std::min(0.25, std::numbers::pi / (4.0 * std::log(static_cast<double>(K))))
                             : 0.25;
  const auto panels = static_cast<std::int64_t>(std::ceil((b - a) / width));
  DyadicMomentResult out;
  out.K = K;
  out.ell = ell;
  out.value = dyadic_quadrature(poly, a, b, panels);
  out.refined = dyadic_quadrature(poly, a, b, 2 * panels);
  if (std::abs(out.refined - out.value) > 1e-8 * std::abs(out.refined)) {
    std::ostringstream msg;
    msg.precision(15);
    msg << "dyadic moment: " << out.value << " vs refined " << out.refined;
    throw NumericalAuditError(msg.str());
  }
  out.normalized = out.value / (static_cast<double>(K) * static_cast<double>(K));
  return out;
}

}  // namespace diagpc
