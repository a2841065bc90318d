#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "diagpc/forms.hpp"

namespace diagpc {

enum class ConstantMethod { monte_carlo, closed_form, density_of_states };

const char* to_string(ConstantMethod m) noexcept;

struct ConstantEstimate {
  double value = 0.0;
  double std_error = 0.0;
  ConstantMethod method = ConstantMethod::monte_carlo;
  std::uint64_t samples = 0;
  std::vector<double> epsilon_schedule;
  /// Per-epsilon estimates and their standard errors (pair constant only).
  std::vector<double> per_epsilon;
  std::vector<double> per_epsilon_stderr;
  /// Raw Monte Carlo value when `value` is a gated closed form.
  std::optional<double> monte_carlo;
  /// Closed-form cross-check value when `value` is a Monte Carlo estimate.
  std::optional<double> closed_form;
  /// Set when the estimate is not extrapolated or the extrapolation looks unstable.
  bool flagged = false;
};

struct MonteCarloOptions {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  int threads = 1;
  /// Gate: |MC - closed form| must stay within this many standard errors.
  double gate_sigmas = 4.0;
};

/// Octant-ellipsoid and Dirichlet-integral volumes of {x >= 0 : form(x) <= 1}:
/// pi / (6 sqrt(alpha beta)) and Gamma(1 + 1/k)^k / prod alpha_i^(1/k).
double unit_volume_closed_form(const Form& form);

/// Pair constant implied by the density of states rho(E) = V'(E):
/// integral_0^1 rho(E)^2 dE, i.e. (9/8) V(1)^2 for quadratic forms and
/// V(1)^2 for power forms.
double pair_constant_closed_form(const Form& form);

/// Hit-or-miss Monte Carlo of V(1) in the box prod [0, alpha_i^(-1/d)].
ConstantEstimate volume_unit_monte_carlo(const Form& form, const MonteCarloOptions& opts = {});

/// Closed-form V(1), gated by volume_unit_monte_carlo. Throws
/// NumericalAuditError when the two disagree beyond opts.gate_sigmas.
ConstantEstimate volume_unit(const Form& form, const MonteCarloOptions& opts = {});

/// Monte Carlo estimate of
///   c = lim (1/eps) |{(x, y) in R+^3 x R+^3 : Q(x) <= 1, |Q(x) - Q(y)| < eps/2}|
/// at each eps of the schedule, linearly extrapolated to eps = 0.
///
/// `samples` x-points and `samples` y-points are drawn uniformly in their
/// bounding boxes (Q(y) <= 1 + eps_max/2 is implied) and every x-y cross
/// pair is tested, counted by a sorted sweep. The standard error is the
/// two-sample U-statistic one. The density-of-states value is attached as
/// closed_form.
ConstantEstimate pair_constant_quadratic(const QuadraticForm& form,
                                         std::span<const double> eps_schedule,
                                         const MonteCarloOptions& opts = {});

/// c^2 for the power-form prediction, from the gated volume_unit.
ConstantEstimate pair_constant_power(const PowerForm& form, const MonteCarloOptions& opts = {});

/// Closed-form pair constant after a Monte Carlo gate; this is the value
/// used for Poisson predictions.
ConstantEstimate gated_pair_constant(const Form& form, const MonteCarloOptions& opts = {});

}  // namespace diagpc
