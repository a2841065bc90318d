#include "diagpc/volume.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "diagpc/errors.hpp"
#include "diagpc/parallel.hpp"
#include "diagpc/rng.hpp"

namespace diagpc {

const char* to_string(ConstantMethod m) noexcept {
  switch (m) {
    case ConstantMethod::monte_carlo: return "monte-carlo";
    case ConstantMethod::closed_form: return "closed-form";
    case ConstantMethod::density_of_states: return "density-of-states";
  }
  return "?";
}

double unit_volume_closed_form(const Form& form) {
  if (const auto* q = std::get_if<QuadraticForm>(&form)) {
    return std::numbers::pi / (6.0 * std::sqrt(q->alpha() * q->beta()));
  }
  const auto& p = std::get<PowerForm>(form);
  const double k = p.k();
  double v = std::pow(std::tgamma(1.0 + 1.0 / k), k);
  for (double a : p.coeffs()) v /= std::pow(a, 1.0 / k);
  return v;
}

double pair_constant_closed_form(const Form& form) {
  const double v = unit_volume_closed_form(form);
  return is_quadratic(form) ? 9.0 / 8.0 * v * v : v * v;
}

namespace {

constexpr std::uint64_t kBatch = 1 << 16;
constexpr std::uint64_t kVolumeStream = 0x766f6c0000000000ULL;
constexpr std::uint64_t kPairXStream = 0x7061697258000000ULL;
constexpr std::uint64_t kPairYStream = 0x7061697259000000ULL;

double form_value(std::span<const double> c, std::span<const double> x, int deg) {
  double acc = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    double p = x[i];
    for (int e = 1; e < deg; ++e) p *= x[i];
    acc += c[i] * p;
  }
  return acc;
}

/// Q-values of `n` uniform points in prod [0, side_i], one stream per batch.
std::vector<double> sample_form_values(std::span<const double> c, std::span<const double> side,
                                       int deg, std::uint64_t n, std::uint64_t seed,
                                       std::uint64_t stream_base, int threads) {
  const std::size_t d = c.size();
  std::vector<double> out(n);
  const std::uint64_t batches = (n + kBatch - 1) / kBatch;
  parallel_for(batches, threads, [&](std::size_t b) {
    const CounterRng rng(seed, stream_base + b);
    std::vector<double> x(d);
    const std::uint64_t lo = b * kBatch;
    const std::uint64_t hi = std::min<std::uint64_t>(n, lo + kBatch);
    for (std::uint64_t s = lo; s < hi; ++s) {
      const std::uint64_t local = s - lo;
      for (std::size_t i = 0; i < d; ++i) x[i] = side[i] * rng.uniform(local * d + i);
      out[s] = form_value(c, x, deg);
    }
  });
  return out;
}

double box_volume(std::span<const double> side) {
  double v = 1.0;
  for (double s : side) v *= s;
  return v;
}

void gate(double closed, double mc, double sigma, double sigmas, const char* what) {
  if (std::abs(mc - closed) > sigmas * sigma) {
    std::ostringstream msg;
    msg.precision(10);
    msg << what << ": Monte Carlo " << mc << " +- " << sigma << " disagrees with closed form "
        << closed << " beyond " << sigmas << " sigma";
    throw NumericalAuditError(msg.str());
  }
}

}  // namespace

ConstantEstimate volume_unit_monte_carlo(const Form& form, const MonteCarloOptions& opts) {
  if (opts.samples < 1) throw ConfigError("volume_unit needs at least one sample");
  const auto c = coefficients(form);
  const int deg = degree(form);
  std::vector<double> side(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) side[i] = std::pow(1.0 / c[i], 1.0 / deg);
  const auto q = sample_form_values(c, side, deg, opts.samples, opts.seed, kVolumeStream,
                                    opts.threads);
  std::uint64_t hits = 0;
  for (double v : q) hits += (v <= 1.0) ? 1 : 0;
  const double n = static_cast<double>(opts.samples);
  const double p = static_cast<double>(hits) / n;
  const double vol = box_volume(side);
  ConstantEstimate est;
  est.method = ConstantMethod::monte_carlo;
  est.samples = opts.samples;
  est.value = vol * p;
  est.std_error = vol * std::sqrt(p * (1 - p) / n);
  est.monte_carlo = est.value;
  est.closed_form = unit_volume_closed_form(form);
  return est;
}

ConstantEstimate volume_unit(const Form& form, const MonteCarloOptions& opts) {
  auto est = volume_unit_monte_carlo(form, opts);
  gate(*est.closed_form, est.value, est.std_error, opts.gate_sigmas, "volume_unit");
  est.value = *est.closed_form;
  est.method = ConstantMethod::closed_form;
  return est;
}

ConstantEstimate pair_constant_quadratic(const QuadraticForm& form,
                                         std::span<const double> eps_schedule,
                                         const MonteCarloOptions& opts) {
  if (eps_schedule.empty()) throw ConfigError("pair_constant_quadratic needs an eps schedule");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] > 0)) throw ConfigError("eps values must be positive");
    if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1])) {
      throw ConfigError("eps schedule must be strictly decreasing");
    }
  }
  if (opts.samples < 1'000'000) {
    throw ConfigError("pair_constant_quadratic needs at least 1e6 samples per eps");
  }
  const Form f = form;
  const auto c = coefficients(f);
  const double eps_max = eps_schedule.front();
  std::vector<double> side_x(3), side_y(3);
  for (std::size_t i = 0; i < 3; ++i) {
    side_x[i] = std::sqrt(1.0 / c[i]);
    // Q(x) <= 1 and |Q(x) - Q(y)| < eps/2 imply Q(y) < 1 + eps/2
    side_y[i] = std::sqrt((1.0 + 0.5 * eps_max) / c[i]);
  }
  const std::uint64_t n = opts.samples;
  auto qx = sample_form_values(c, side_x, 2, n, opts.seed, kPairXStream, opts.threads);
  auto qy = sample_form_values(c, side_y, 2, n, opts.seed, kPairYStream, opts.threads);
  std::erase_if(qx, [](double v) { return !(v <= 1.0); });
  std::sort(qx.begin(), qx.end());
  std::sort(qy.begin(), qy.end());
  const double vol = box_volume(side_x) * box_volume(side_y);
  const double nn = static_cast<double>(n);

  ConstantEstimate est;
  est.method = ConstantMethod::monte_carlo;
  est.samples = n;
  est.epsilon_schedule.assign(eps_schedule.begin(), eps_schedule.end());
  est.closed_form = pair_constant_closed_form(f);

  for (double eps : eps_schedule) {
    const double h = 0.5 * eps;
    // |qx - qy| < h, swept from both sides for the two Hoeffding terms
    auto sweep = [h](const std::vector<double>& rows, const std::vector<double>& cols,
                     double& sum, double& sum_sq) {
      std::size_t lo = 0, hi = 0;
      sum = 0.0;
      sum_sq = 0.0;
      for (double r : rows) {
        while (lo < cols.size() && !(r - cols[lo] < h)) ++lo;
        while (hi < cols.size() && r - cols[hi] > -h) ++hi;
        const double g = static_cast<double>(hi - lo);
        sum += g;
        sum_sq += g * g;
      }
    };
    double gx = 0, gx2 = 0, hy = 0, hy2 = 0;
    sweep(qx, qy, gx, gx2);
    sweep(qy, qx, hy, hy2);
    if (gx != hy) throw NumericalAuditError("pair constant sweeps disagree on the hit count");
    const double u = gx / (nn * nn);
    // rows beyond the kept x-samples contribute zero counts
    const double var_g = (gx2 / (nn * nn)) / nn - (gx / nn / nn) * (gx / nn / nn);
    const double var_h = (hy2 / (nn * nn)) / nn - (hy / nn / nn) * (hy / nn / nn);
    const double var_u = std::max(0.0, var_g) / nn + std::max(0.0, var_h) / nn + u * (1 - u) / (nn * nn);
    est.per_epsilon.push_back(vol * u / eps);
    est.per_epsilon_stderr.push_back(vol * std::sqrt(var_u) / eps);
  }

  const auto& e = est.epsilon_schedule;
  const auto& y = est.per_epsilon;
  const auto& s = est.per_epsilon_stderr;
  if (e.size() == 1) {
    est.value = y[0];
    est.std_error = s[0];
    est.flagged = true;
    return est;
  }
  // weighted least squares line in eps, intercept = sum a_i y_i
  double S = 0, Sx = 0, Sxx = 0;
  std::vector<double> w(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    w[i] = 1.0 / std::max(s[i] * s[i], 1e-300);
    S += w[i];
    Sx += w[i] * e[i];
    Sxx += w[i] * e[i] * e[i];
  }
  const double det = S * Sxx - Sx * Sx;
  est.value = 0.0;
  est.std_error = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double a = w[i] * (Sxx - Sx * e[i]) / det;
    est.value += a * y[i];
    // the per-eps estimates share samples; |a_i| sigma_i bounds any correlation
    est.std_error += std::abs(a) * s[i];
  }
  for (std::size_t i = 0; i + 2 < e.size(); ++i) {
    const double d1 = y[i + 1] - y[i];
    const double d2 = y[i + 2] - y[i + 1];
    const double tol1 = 2 * std::hypot(s[i], s[i + 1]);
    const double tol2 = 2 * std::hypot(s[i + 1], s[i + 2]);
    if (d1 * d2 < 0 && std::abs(d1) > tol1 && std::abs(d2) > tol2) est.flagged = true;
  }
  return est;
}

ConstantEstimate pair_constant_power(const PowerForm& form, const MonteCarloOptions& opts) {
  const auto v = volume_unit(Form{form}, opts);
  ConstantEstimate est = v;
  est.value = v.value * v.value;
  est.std_error = 2.0 * v.value * v.std_error;
  est.monte_carlo = *v.monte_carlo * *v.monte_carlo;
  est.closed_form = est.value;
  return est;
}

ConstantEstimate gated_pair_constant(const Form& form, const MonteCarloOptions& opts) {
  if (const auto* q = std::get_if<QuadraticForm>(&form)) {
    static constexpr double kSchedule[] = {0.1, 0.01, 0.001};
    auto mc = pair_constant_quadratic(*q, kSchedule, opts);
    gate(*mc.closed_form, mc.value, mc.std_error, opts.gate_sigmas, "pair_constant_quadratic");
    ConstantEstimate est = mc;
    est.monte_carlo = mc.value;
    est.value = *mc.closed_form;
    est.method = ConstantMethod::density_of_states;
    return est;
  }
  return pair_constant_power(std::get<PowerForm>(form), opts);
}

}  // namespace diagpc
