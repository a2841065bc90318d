#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "diagpc/forms.hpp"
#include "diagpc/lattice.hpp"

namespace diagpc {

using Complex = std::complex<double>;

struct DirichletSumResult {
  double t = 0.0;
  Complex value;
  std::uint64_t terms = 0;
};

/// sum_{k = k_lo}^{k_hi} k^{it}, compensated.
DirichletSumResult dirichlet_sum(std::int64_t k_lo, std::int64_t k_hi, double t);

/// sum_j w_j exp(i t lambda_j) with lambda_j = log(base_j).
class DirichletPolynomial {
 public:
  DirichletPolynomial() = default;
  explicit DirichletPolynomial(std::vector<double> log_bases, std::vector<double> weights = {});

  Complex operator()(double t) const;
  /// Values at t = 0, h, ..., (count - 1) h, by phase rotation with periodic
  /// exact reseeding.
  std::vector<Complex> on_grid(double h, std::size_t count) const;
  /// Values at t = t0 + g h, g = 0 .. count - 1.
  std::vector<Complex> on_grid(double t0, double h, std::size_t count) const;

  std::size_t size() const noexcept { return log_bases_.size(); }
  std::span<const double> log_bases() const noexcept { return log_bases_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double weight_sum() const;
  double min_log() const;
  double max_log() const;

 private:
  std::vector<double> log_bases_;
  std::vector<double> weights_;
};

/// 0 <= w <= 1. Gaussian: exp(-x^2 / (2 width^2)). Bump: 1 on
/// |x| <= width (1 - plateau), quintic smoothstep down to 0 at |x| = width.
struct SmoothWindow {
  enum class Kind { gaussian, bump };
  Kind kind = Kind::gaussian;
  double width = 1.0;
  double plateau = 0.0;

  static SmoothWindow gaussian(double width = 1.0) { return {Kind::gaussian, width, 0.0}; }
  static SmoothWindow bump(double plateau, double width = 1.0) { return {Kind::bump, width, plateau}; }

  double operator()(double x) const;
  /// w^(t) = integral w(s) exp(-i t s) ds; Gaussian only.
  double transform(double t) const;
  /// |s| beyond which w(s) < 1e-17 (Gaussian).
  double cutoff() const;
};

/// Sum over m_i in I_i, n_i in J_i (i = 1, 2) of
/// (n1^2 - m1^2 + alpha (n2^2 - m2^2) + xi)^{it}. Throws DomainError on a
/// nonpositive base.
DirichletPolynomial s1_quadratic_terms(const BoxPair& boxes, double alpha, double xi);
Complex s1_quadratic(const BoxPair& boxes, double alpha, double xi, double t);

/// sum over m in I3, n in J3 of (m^2 - n^2)^{it}.
DirichletPolynomial s2_quadratic_terms(const BoxInterval& I3, const BoxInterval& J3);
/// Sharp sum without a window; with a window, the localized sum over the
/// factored variables p = m - n, q = m + n (see s2_quadratic_factored).
Complex s2_quadratic(const BoxInterval& I3, const BoxInterval& J3, double t,
                     std::optional<SmoothWindow> window = std::nullopt);
/// sum over m, n of phi((m - u)/du) phi((n - v)/dv) (m^2 - n^2)^{it}; sharp
/// indicator of the integer boxes when no window is given.
Complex s2_quadratic_direct(const BoxInterval& I3, const BoxInterval& J3, double t,
                            std::optional<SmoothWindow> window = std::nullopt);
/// Same sum written over p = m - n >= 1 and q = m + n of the same parity:
/// sum phi(((p + q)/2 - u)/du) phi(((q - p)/2 - v)/dv) p^{it} q^{it}.
Complex s2_quadratic_factored(const BoxInterval& I3, const BoxInterval& J3, double t,
                              std::optional<SmoothWindow> window = std::nullopt);

/// Degree-k analogues: bases n1^k - m1^k + sum_{i=2}^{k-1} alpha_i (ni^k - mi^k) + xi
/// over the first k-1 coordinates, and (m^k - n^k) over the last one.
DirichletPolynomial s1_power_terms(const BoxPair& boxes, const PowerForm& form, double xi = 0.0);
Complex s1_power(const BoxPair& boxes, const PowerForm& form, double t, double xi = 0.0);
DirichletPolynomial s2_power_terms(const BoxInterval& Ik, const BoxInterval& Jk, int k);
Complex s2_power(const BoxInterval& Ik, const BoxInterval& Jk, int k, double t);

/// Quadrature plan for the windowed Fourier pair count.
struct TransformSpec {
  double B = 0.0;
  double B0 = 0.0;
  double step = 0.0;
  double t_max = 0.0;
  SmoothWindow window;
};

/// B = c_last k0 / delta and B0 = c_last k0 / T^(2/3) (quadratic) or
/// c_last k0 / T^(1 - kappa) (power).
TransformSpec transform_spec(const Form& form, const BoxPair& boxes, double delta,
                             double kappa = 1.0 / 3.0);

struct FourierPairCount {
  double integral = 0.0;  ///< (1 / 2 pi) int S1 conj(S2) e^{-it log c} w^(t/B) / B dt
  double direct = 0.0;    ///< sum over pairs of w(B (log X - log Y - log c))
  double difference = 0.0;
  double refined = 0.0;   ///< integral at half the step
  double step = 0.0;
  double t_max = 0.0;
  std::size_t grid_points = 0;
};

struct FourierOptions {
  double tolerance = 1e-6;  ///< relative to max(1, |direct|)
};

/// Windowed pair count between the I and J boxes through the Fourier side,
/// checked against the direct sum. `form` supplies alpha (S1) and the last
/// coefficient c (the log shift). Gaussian windows only.
FourierPairCount windowed_pair_count_fourier(const BoxPair& boxes, const Form& form, double xi,
                                             const SmoothWindow& window, double B,
                                             const FourierOptions& opts = {});

struct SplitSample {
  double coefficient = 0.0;
  double main = 0.0;
  double exact = 0.0;
  double remainder = 0.0;
  double direct_exact = 0.0;
  double direct_main = 0.0;
};

struct MainRemainderSplit {
  std::vector<SplitSample> samples;
  double main_mean = 0.0;
  double remainder_mean = 0.0;
  double remainder_rms = 0.0;
  /// rms(remainder) / mean(main)
  double relative_rms = 0.0;
  double max_audit_difference = 0.0;
};

/// main(c) = (B0/B) sum w(B0 L), exact(c) = sum w(B L), remainder = exact - main,
/// for the last coefficient c drawn uniformly in [1/2, 1]; both through the
/// Fourier side and audited against direct sums.
MainRemainderSplit main_remainder_split(const BoxPair& boxes, const Form& form, double xi,
                                        const SmoothWindow& window, double B, double B0,
                                        std::size_t coefficient_samples, std::uint64_t seed,
                                        const FourierOptions& opts = {});

struct AlphaAverage {
  double t = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t terms = 0;
  /// terms^2 / |t|, the shape of the averaged bound
  double envelope = 0.0;
};

/// Monte Carlo average over alpha in [1/2, 1] of |S1(t)|^2.
AlphaAverage alpha_average_s1_sq(const BoxPair& boxes, double xi, double t,
                                 std::size_t n_samples, std::uint64_t seed = 0);

struct DecayTable {
  std::vector<double> t;
  std::vector<double> normalized;  ///< |S2(t)| / (#I #J)
  double gamma_hat = 0.0;          ///< minus the log-log slope over the grid
};

DecayTable s2_sup_decay(const BoxInterval& I, const BoxInterval& J, int degree,
                        std::span<const double> t_grid);

/// Least-squares slope of log y against log x.
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace diagpc
