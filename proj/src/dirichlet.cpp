#include <algorithm>
#include <cmath>
#include <sstream>

#include "diagpc/analytic.hpp"
#include "diagpc/errors.hpp"
#include "diagpc/rng.hpp"
#include "diagpc/summation.hpp"

namespace diagpc {

DirichletSumResult dirichlet_sum(std::int64_t k_lo, std::int64_t k_hi, double t) {
  if (!(k_lo >= 1 && k_lo <= k_hi)) throw ConfigError("dirichlet_sum needs 1 <= k_lo <= k_hi");
  CompensatedComplexSum sum;
  for (std::int64_t k = k_lo; k <= k_hi; ++k) {
    const double phase = t * std::log(static_cast<double>(k));
    sum.add({std::cos(phase), std::sin(phase)});
  }
  return {t, sum.value(), static_cast<std::uint64_t>(k_hi - k_lo + 1)};
}

DirichletPolynomial::DirichletPolynomial(std::vector<double> log_bases, std::vector<double> weights)
    : log_bases_(std::move(log_bases)), weights_(std::move(weights)) {
  if (weights_.empty()) weights_.assign(log_bases_.size(), 1.0);
  if (weights_.size() != log_bases_.size()) {
    throw ConfigError("DirichletPolynomial weights and bases differ in length");
  }
}

Complex DirichletPolynomial::operator()(double t) const {
  CompensatedComplexSum sum;
  for (std::size_t j = 0; j < log_bases_.size(); ++j) {
    const double phase = t * log_bases_[j];
    sum.add({weights_[j] * std::cos(phase), weights_[j] * std::sin(phase)});
  }
  return sum.value();
}

std::vector<Complex> DirichletPolynomial::on_grid(double h, std::size_t count) const {
  return on_grid(0.0, h, count);
}

std::vector<Complex> DirichletPolynomial::on_grid(double t0, double h, std::size_t count) const {
  constexpr std::size_t kReseed = 64;
  std::vector<CompensatedComplexSum> acc(count);
  for (std::size_t j = 0; j < log_bases_.size(); ++j) {
    const double lam = log_bases_[j];
    const double w = weights_[j];
    if (w == 0.0) continue;
    const Complex rot(std::cos(h * lam), std::sin(h * lam));
    Complex z;
    for (std::size_t g = 0; g < count; ++g) {
      if (g % kReseed == 0) {
        const double phase = (t0 + static_cast<double>(g) * h) * lam;
        z = Complex(w * std::cos(phase), w * std::sin(phase));
      }
      acc[g].add(z);
      z *= rot;
    }
  }
  std::vector<Complex> out(count);
  for (std::size_t g = 0; g < count; ++g) out[g] = acc[g].value();
  return out;
}

double DirichletPolynomial::weight_sum() const {
  CompensatedSum s;
  for (double w : weights_) s.add(w);
  return s.value();
}

double DirichletPolynomial::min_log() const {
  return log_bases_.empty() ? 0.0 : *std::min_element(log_bases_.begin(), log_bases_.end());
}

double DirichletPolynomial::max_log() const {
  return log_bases_.empty() ? 0.0 : *std::max_element(log_bases_.begin(), log_bases_.end());
}

double SmoothWindow::operator()(double x) const {
  if (kind == Kind::gaussian) {
    const double s = x / width;
    return std::exp(-0.5 * s * s);
  }
  const double y = std::abs(x) / width;
  if (y >= 1.0) return 0.0;
  if (y <= 1.0 - plateau) return 1.0;
  const double s = (1.0 - y) / plateau;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double SmoothWindow::transform(double t) const {
  if (kind != Kind::gaussian) throw ConfigError("closed-form transform is Gaussian only");
  const double s = width * t;
  return width * std::sqrt(2.0 * M_PI) * std::exp(-0.5 * s * s);
}

double SmoothWindow::cutoff() const {
  // exp(-x^2/2) < 1e-17 beyond x = 8.88
  return 9.0 * width;
}

namespace {

/// Differences n^d - m^d over m in I, n in J (exact integers).
std::vector<std::int64_t> power_differences(const BoxInterval& I, const BoxInterval& J, int d) {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(I.count() * J.count()));
  for (std::int64_t m = I.first(); m <= I.last(); ++m) {
    for (std::int64_t n = J.first(); n <= J.last(); ++n) {
      out.push_back(exact_power(n, d) - exact_power(m, d));
    }
  }
  return out;
}

/// log of d_1 + c_2 d_2 + ... + xi over the product of difference lists.
DirichletPolynomial product_bases(const std::vector<std::vector<std::int64_t>>& diffs,
                                  std::span<const double> c, double xi) {
  std::uint64_t total = 1;
  for (const auto& d : diffs) total *= d.size();
  if (total > (std::uint64_t{1} << 30)) throw CapacityError("Dirichlet sum has too many terms");
  std::vector<double> logs;
  logs.reserve(total);
  std::vector<std::size_t> idx(diffs.size(), 0);
  if (total == 0) return DirichletPolynomial(std::vector<double>{});
  for (;;) {
    double acc = static_cast<double>(diffs[0][idx[0]]);
    for (std::size_t i = 1; i < diffs.size(); ++i) {
      acc = acc + c[i] * static_cast<double>(diffs[i][idx[i]]);
    }
    acc = acc + xi;
    if (!(acc > 0)) {
      std::ostringstream msg;
      msg << "nonpositive base " << acc << " at difference tuple (";
      for (std::size_t i = 0; i < diffs.size(); ++i) msg << (i ? ", " : "") << diffs[i][idx[i]];
      msg << ")";
      throw DomainError(msg.str());
    }
    logs.push_back(std::log(acc));
    std::size_t i = diffs.size();
    while (i > 0) {
      --i;
      if (++idx[i] < diffs[i].size()) break;
      idx[i] = 0;
      if (i == 0) return DirichletPolynomial(std::move(logs));
    }
  }
}

}  // namespace

DirichletPolynomial s1_quadratic_terms(const BoxPair& boxes, double alpha, double xi) {
  if (boxes.dimension() != 3) throw ConfigError("s1_quadratic needs three-dimensional boxes");
  const std::vector<std::vector<std::int64_t>> diffs{power_differences(boxes.I[0], boxes.J[0], 2),
                                                     power_differences(boxes.I[1], boxes.J[1], 2)};
  const double c[] = {1.0, alpha};
  return product_bases(diffs, c, xi);
}

Complex s1_quadratic(const BoxPair& boxes, double alpha, double xi, double t) {
  return s1_quadratic_terms(boxes, alpha, xi)(t);
}

DirichletPolynomial s2_quadratic_terms(const BoxInterval& I3, const BoxInterval& J3) {
  return s2_power_terms(I3, J3, 2);
}

namespace {

double box_weight(const std::optional<SmoothWindow>& window, const BoxInterval& box, double x) {
  if (!window || box.half_width == 0.0) return 1.0;
  return (*window)((x - box.center) / box.half_width);
}

}  // namespace

Complex s2_quadratic_direct(const BoxInterval& I3, const BoxInterval& J3, double t,
                            std::optional<SmoothWindow> window) {
  CompensatedComplexSum sum;
  for (std::int64_t m = I3.first(); m <= I3.last(); ++m) {
    const double wm = box_weight(window, I3, static_cast<double>(m));
    for (std::int64_t n = J3.first(); n <= J3.last(); ++n) {
      const std::int64_t base = m * m - n * n;
      if (base <= 0) throw DomainError("s2: nonpositive base m^2 - n^2 at m = " +
                                       std::to_string(m) + ", n = " + std::to_string(n));
      const double w = wm * box_weight(window, J3, static_cast<double>(n));
      const double phase = t * std::log(static_cast<double>(base));
      sum.add({w * std::cos(phase), w * std::sin(phase)});
    }
  }
  return sum.value();
}

Complex s2_quadratic_factored(const BoxInterval& I3, const BoxInterval& J3, double t,
                              std::optional<SmoothWindow> window) {
  CompensatedComplexSum sum;
  if (I3.count() == 0 || J3.count() == 0) return {};
  const std::int64_t p_lo = I3.first() - J3.last();
  const std::int64_t p_hi = I3.last() - J3.first();
  if (p_lo < 1) throw DomainError("s2: boxes not separated (m - n < 1 occurs)");
  for (std::int64_t p = p_lo; p <= p_hi; ++p) {
    const double lp = std::log(static_cast<double>(p));
    std::int64_t q_lo = I3.first() + J3.first();
    if ((q_lo - p) % 2 != 0) ++q_lo;
    for (std::int64_t q = q_lo; q <= I3.last() + J3.last(); q += 2) {
      const std::int64_t m = (p + q) / 2;
      const std::int64_t n = (q - p) / 2;
      if (m < I3.first() || m > I3.last() || n < J3.first() || n > J3.last()) continue;
      const double w = box_weight(window, I3, static_cast<double>(m)) *
                       box_weight(window, J3, static_cast<double>(n));
      const double phase = t * (lp + std::log(static_cast<double>(q)));
      sum.add({w * std::cos(phase), w * std::sin(phase)});
    }
  }
  return sum.value();
}

Complex s2_quadratic(const BoxInterval& I3, const BoxInterval& J3, double t,
                     std::optional<SmoothWindow> window) {
  if (!window) return s2_quadratic_direct(I3, J3, t);
  return s2_quadratic_factored(I3, J3, t, window);
}

DirichletPolynomial s1_power_terms(const BoxPair& boxes, const PowerForm& form, double xi) {
  const int k = form.k();
  if (boxes.dimension() != k) throw ConfigError("s1_power: box dimension differs from k");
  std::vector<std::vector<std::int64_t>> diffs;
  std::vector<double> c{1.0};
  for (int i = 0; i + 1 < k; ++i) {
    diffs.push_back(power_differences(boxes.I[static_cast<std::size_t>(i)],
                                      boxes.J[static_cast<std::size_t>(i)], k));
    if (i > 0) c.push_back(form.coeffs()[static_cast<std::size_t>(i - 1)]);
  }
  return product_bases(diffs, c, xi);
}

Complex s1_power(const BoxPair& boxes, const PowerForm& form, double t, double xi) {
  return s1_power_terms(boxes, form, xi)(t);
}

DirichletPolynomial s2_power_terms(const BoxInterval& Ik, const BoxInterval& Jk, int k) {
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(Ik.count() * Jk.count()));
  for (std::int64_t m = Ik.first(); m <= Ik.last(); ++m) {
    for (std::int64_t n = Jk.first(); n <= Jk.last(); ++n) {
      const std::int64_t base = exact_power(m, k) - exact_power(n, k);
      if (base <= 0) throw DomainError("s2: nonpositive base m^k - n^k at m = " +
                                       std::to_string(m) + ", n = " + std::to_string(n));
      logs.push_back(std::log(static_cast<double>(base)));
    }
  }
  return DirichletPolynomial(std::move(logs));
}

Complex s2_power(const BoxInterval& Ik, const BoxInterval& Jk, int k, double t) {
  return s2_power_terms(Ik, Jk, k)(t);
}

AlphaAverage alpha_average_s1_sq(const BoxPair& boxes, double xi, double t,
                                 std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 1000) throw ConfigError("alpha_average_s1_sq needs at least 1000 samples");
  if (boxes.dimension() != 3) throw ConfigError("alpha_average_s1_sq needs quadratic boxes");
  const auto d1 = power_differences(boxes.I[0], boxes.J[0], 2);
  const auto d2 = power_differences(boxes.I[1], boxes.J[1], 2);
  const std::vector<std::vector<std::int64_t>> diffs{d1, d2};
  const CounterRng rng(seed, 0x616c706861ULL);
  CompensatedSum sum, sum_sq;
  std::uint64_t terms = 0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const double alpha = rng.uniform(s, 0.5, 1.0);
    const double c[] = {1.0, alpha};
    const auto poly = product_bases(diffs, c, xi);
    terms = poly.size();
    const double v = std::norm(poly(t));
    sum.add(v);
    sum_sq.add(v * v);
  }
  const double n = static_cast<double>(n_samples);
  AlphaAverage out;
  out.t = t;
  out.terms = terms;
  out.mean = sum.value() / n;
  const double var = std::max(0.0, sum_sq.value() / n - out.mean * out.mean);
  out.std_error = std::sqrt(var / n);
  out.envelope = t != 0 ? static_cast<double>(terms) * static_cast<double>(terms) / std::abs(t)
                        : static_cast<double>(terms) * static_cast<double>(terms);
  return out;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("log_log_slope needs >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0 && y[i] > 0)) throw DomainError("log_log_slope needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

DecayTable s2_sup_decay(const BoxInterval& I, const BoxInterval& J, int degree,
                        std::span<const double> t_grid) {
  const auto poly = s2_power_terms(I, J, degree);
  const double norm = static_cast<double>(poly.size());
  DecayTable table;
  std::vector<double> fit_t, fit_y;
  for (double t : t_grid) {
    const double v = norm > 0 ? std::abs(poly(t)) / norm : 0.0;
    table.t.push_back(t);
    table.normalized.push_back(v);
    if (t > 0 && v > 0) {
      fit_t.push_back(t);
      fit_y.push_back(v);
    }
  }
  if (fit_t.size() >= 2) table.gamma_hat = -log_log_slope(fit_t, fit_y);
  return table;
}

}  // namespace diagpc
