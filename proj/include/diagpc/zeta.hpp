#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace diagpc {

inline constexpr double kZetaMaxT = 1e5;
inline constexpr double kEtaMaxT = 250.0;

/// zeta(1/2 + it) by Euler-Maclaurin with six correction terms. The cutoff N
/// starts at max(20, ceil(2 + |t| / 2 pi)) and grows until the remainder bound
/// falls below 1e-10. Throws DomainError for |t| > 1e5.
std::complex<double> zeta_half_line(double t);

/// Remainder bound of the Euler-Maclaurin evaluation at cutoff n.
double zeta_remainder_bound(double t, std::int64_t n);

/// zeta(1/2 + it) from the alternating eta series with Borwein's acceleration;
/// independent of zeta_half_line. Throws DomainError for |t| > 250.
std::complex<double> zeta_half_line_eta(double t);

struct ZetaMomentResult {
  double t_star = 0.0;
  double integral = 0.0;      ///< int_1^{t*} |zeta(1/2 + it)|^4 dt
  double error_estimate = 0.0;
  double fit_exponent = 0.0;  ///< log-log slope across the sweep (0 for a single t*)
};

/// Gauss-Kronrod (7, 15) panels of width <= 0.05. Requires 1 < t_star <= 1e3.
ZetaMomentResult zeta_fourth_moment(double t_star);

/// One cumulative pass over increasing t* values with the fitted exponent.
std::vector<ZetaMomentResult> zeta_fourth_moment_sweep(std::span<const double> t_stars);

struct DyadicMomentResult {
  std::int64_t K = 0;
  int ell = 0;
  double value = 0.0;       ///< 2^-ell int_{2^ell}^{2^(ell+1)} |sum_{k<=K} k^{it}|^4 dt
  double normalized = 0.0;  ///< value / K^2
  double refined = 0.0;     ///< same at half the panel width
};

/// Composite 8-point Gauss-Legendre; K <= 1e3, 0 <= ell <= 12. Throws
/// NumericalAuditError when halving the panels moves the value by more than 1e-8
/// relative.
DyadicMomentResult dirichlet_fourth_moment_dyadic(std::int64_t K, int ell);

}  // namespace diagpc
