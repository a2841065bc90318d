#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "diagpc/analytic.hpp"
#include "diagpc/errors.hpp"
#include "diagpc/rng.hpp"
#include "diagpc/summation.hpp"

namespace diagpc {

namespace {

struct PairBases {
  std::vector<double> log_x;  // S1 bases, sorted
  std::vector<double> log_y;  // S2 bases, sorted
  DirichletPolynomial s1;
  DirichletPolynomial s2;
};

PairBases pair_bases(const BoxPair& boxes, const Form& form, double xi) {
  PairBases pb;
  if (const auto* q = std::get_if<QuadraticForm>(&form)) {
    pb.s1 = s1_quadratic_terms(boxes, q->alpha(), xi);
    pb.s2 = s2_quadratic_terms(boxes.I[2], boxes.J[2]);
  } else {
    const auto& p = std::get<PowerForm>(form);
    pb.s1 = s1_power_terms(boxes, p, xi);
    const auto last = static_cast<std::size_t>(p.k() - 1);
    pb.s2 = s2_power_terms(boxes.I.at(last), boxes.J.at(last), p.k());
  }
  if (pb.s1.size() == 0 || pb.s2.size() == 0) throw ConfigError("empty boxes in Fourier pair count");
  pb.log_x.assign(pb.s1.log_bases().begin(), pb.s1.log_bases().end());
  pb.log_y.assign(pb.s2.log_bases().begin(), pb.s2.log_bases().end());
  std::sort(pb.log_x.begin(), pb.log_x.end());
  std::sort(pb.log_y.begin(), pb.log_y.end());
  return pb;
}

double last_coefficient(const Form& form) { return coefficients(form).back(); }

/// Largest |log X - log Y - log c| for c in [c_lo, c_hi].
double max_log_gap(const PairBases& pb, double c_lo, double c_hi) {
  const double hi = pb.log_x.back() - pb.log_y.front() - std::log(c_lo);
  const double lo = pb.log_x.front() - pb.log_y.back() - std::log(c_hi);
  return std::max(std::abs(hi), std::abs(lo));
}

/// Trapezoid step free of aliasing: images of the scaled window at multiples
/// of 2 pi / h stay beyond the support of the log-gap set.
double alias_free_step(double gap, const SmoothWindow& w, double B) {
  return 2.0 * std::numbers::pi / (gap + w.cutoff() / B);
}

double direct_sum(const PairBases& pb, double log_c, const SmoothWindow& w, double B) {
  const double reach = (12.0 / 9.0) * w.cutoff() / B;
  CompensatedSum sum;
  for (double x : pb.log_x) {
    const double centre = x - log_c;
    auto it = std::lower_bound(pb.log_y.begin(), pb.log_y.end(), centre - reach);
    for (; it != pb.log_y.end() && *it <= centre + reach; ++it) {
      sum.add(w(B * (centre - *it)));
    }
  }
  return sum.value();
}

/// Products S1(t_g) conj(S2(t_g)) on the grid t_g = g h.
std::vector<Complex> cross_products(const PairBases& pb, double h, std::size_t count) {
  const auto a = pb.s1.on_grid(h, count);
  const auto b = pb.s2.on_grid(h, count);
  std::vector<Complex> out(count);
  for (std::size_t g = 0; g < count; ++g) out[g] = a[g] * std::conj(b[g]);
  return out;
}

/// (1/pi) Re int_0^inf w^_B(t) P(t) e^{-it log c} dt by the trapezoid rule over
/// every `stride`-th grid point.
double trapezoid(const std::vector<Complex>& products, double h, std::size_t stride, double log_c,
                 const SmoothWindow& w, double B) {
  CompensatedSum sum;
  const double step = h * static_cast<double>(stride);
  for (std::size_t g = 0; g < products.size(); g += stride) {
    const double t = static_cast<double>(g) * h;
    const double weight = w.transform(t / B) / B;
    if (weight == 0.0) break;
    const double phase = -t * log_c;
    const Complex z = products[g] * Complex(std::cos(phase), std::sin(phase));
    sum.add((g == 0 ? 0.5 : 1.0) * weight * z.real());
  }
  return sum.value() * step / std::numbers::pi;
}

void require_gaussian(const SmoothWindow& w) {
  if (w.kind != SmoothWindow::Kind::gaussian) {
    throw ConfigError("Fourier pair counts need a Gaussian window");
  }
  if (!(w.width > 0)) throw ConfigError("window width must be positive");
}

void audit(const char* what, double integral, double refined, double direct, double tol) {
  const double scale = std::max(1.0, std::abs(direct));
  if (std::abs(integral - direct) > tol * scale || std::abs(refined - integral) > tol * scale) {
    std::ostringstream msg;
    msg.precision(15);
    msg << what << ": quadrature " << integral << " (refined " << refined
        << ") disagrees with direct sum " << direct;
    throw NumericalAuditError(msg.str());
  }
}

}  // namespace

TransformSpec transform_spec(const Form& form, const BoxPair& boxes, double delta, double kappa) {
  if (!(delta > 0)) throw ConfigError("transform_spec needs delta > 0");
  TransformSpec spec;
  spec.window = SmoothWindow::gaussian();
  const double c = last_coefficient(form);
  const double k0 = boxes.k0();
  spec.B = c * k0 / delta;
  const double scale = is_quadratic(form) ? std::pow(boxes.T, 2.0 / 3.0)
                                          : std::pow(boxes.T, 1.0 - kappa);
  spec.B0 = c * k0 / scale;
  const auto pb = pair_bases(boxes, form, 0.0);
  spec.t_max = spec.window.cutoff() * spec.B / (spec.window.width * spec.window.width);
  spec.step = alias_free_step(max_log_gap(pb, c, c), spec.window, std::min(spec.B, spec.B0));
  return spec;
}

FourierPairCount windowed_pair_count_fourier(const BoxPair& boxes, const Form& form, double xi,
                                             const SmoothWindow& window, double B,
                                             const FourierOptions& opts) {
  require_gaussian(window);
  if (!(B > 0)) throw ConfigError("windowed_pair_count_fourier needs B > 0");
  const auto pb = pair_bases(boxes, form, xi);
  const double c = last_coefficient(form);
  const double log_c = std::log(c);

  FourierPairCount out;
  out.step = alias_free_step(max_log_gap(pb, c, c), window, B);
  // w^(t/B) = sigma sqrt(2 pi) exp(-(sigma t / B)^2 / 2) is below 1e-17 past 9 B / sigma
  out.t_max = window.cutoff() * B / (window.width * window.width);
  const double h = 0.5 * out.step;
  const auto count = static_cast<std::size_t>(std::ceil(out.t_max / h)) + 1;
  const auto products = cross_products(pb, h, count);
  out.grid_points = (count + 1) / 2;
  out.integral = trapezoid(products, h, 2, log_c, window, B);
  out.refined = trapezoid(products, h, 1, log_c, window, B);
  out.direct = direct_sum(pb, log_c, window, B);
  out.difference = out.integral - out.direct;
  audit("windowed_pair_count_fourier", out.integral, out.refined, out.direct, opts.tolerance);
  return out;
}

MainRemainderSplit main_remainder_split(const BoxPair& boxes, const Form& form, double xi,
                                        const SmoothWindow& window, double B, double B0,
                                        std::size_t coefficient_samples, std::uint64_t seed,
                                        const FourierOptions& opts) {
  require_gaussian(window);
  if (!(B0 > 0 && B >= B0)) throw ConfigError("main_remainder_split needs B >= B0 > 0");
  if (coefficient_samples < 1) throw ConfigError("main_remainder_split needs samples");
  const auto pb = pair_bases(boxes, form, xi);
  const double step = alias_free_step(max_log_gap(pb, 0.5, 1.0), window, B0);
  const double t_max = window.cutoff() * B / (window.width * window.width);
  const double h = 0.5 * step;
  const auto count = static_cast<std::size_t>(std::ceil(t_max / h)) + 1;
  const auto products = cross_products(pb, h, count);

  const CounterRng rng(seed, 0x73706c6974ULL);
  MainRemainderSplit out;
  for (std::size_t s = 0; s < coefficient_samples; ++s) {
    SplitSample sample;
    sample.coefficient = rng.uniform(s, 0.5, 1.0);
    const double log_c = std::log(sample.coefficient);
    const double ratio = B0 / B;
    const double main = ratio * trapezoid(products, h, 2, log_c, window, B0);
    const double main_ref = ratio * trapezoid(products, h, 1, log_c, window, B0);
    const double exact = trapezoid(products, h, 2, log_c, window, B);
    const double exact_ref = trapezoid(products, h, 1, log_c, window, B);
    sample.direct_main = ratio * direct_sum(pb, log_c, window, B0);
    sample.direct_exact = direct_sum(pb, log_c, window, B);
    audit("main term", main, main_ref, sample.direct_main, opts.tolerance);
    audit("exact term", exact, exact_ref, sample.direct_exact, opts.tolerance);
    sample.main = main;
    sample.exact = exact;
    sample.remainder = exact - main;
    out.max_audit_difference =
        std::max({out.max_audit_difference, std::abs(main - sample.direct_main),
                  std::abs(exact - sample.direct_exact)});
    out.samples.push_back(sample);
  }
  CompensatedSum main_sum, rem_sum, rem_sq;
  for (const auto& s : out.samples) {
    main_sum.add(s.main);
    rem_sum.add(s.remainder);
    rem_sq.add(s.remainder * s.remainder);
  }
  const double n = static_cast<double>(out.samples.size());
  out.main_mean = main_sum.value() / n;
  out.remainder_mean = rem_sum.value() / n;
  out.remainder_rms = std::sqrt(rem_sq.value() / n);
  out.relative_rms = out.main_mean > 0 ? out.remainder_rms / out.main_mean
                                       : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace diagpc
