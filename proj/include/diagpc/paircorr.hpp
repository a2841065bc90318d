#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "diagpc/forms.hpp"
#include "diagpc/lattice.hpp"
#include "diagpc/volume.hpp"

namespace diagpc {

/// Ordered index pairs (i, j), i != j, with values[i] - values[j] in [a, b).
/// Two monotone pointers over the sorted array; O(N), pairs never materialized.
/// The workers split the first index range and sum exact integer counts.
std::int64_t ordered_pair_count(std::span<const double> sorted_values, const Window& window,
                                int threads = 1);

/// Same contract by exhaustive double loop; refuses N > 1e5.
std::int64_t brute_force_pair_count(std::span<const double> values, const Window& window);

inline constexpr std::size_t kBruteForceLimit = 100'000;

/// 16 ulp(T); bracket windows are [a + tau, b - tau) and [a - tau, b + tau).
double boundary_tolerance(double T);

struct PairCorrEstimate {
  std::uint64_t N = 0;
  std::int64_t count = 0;
  std::int64_t count_inner = 0;
  std::int64_t count_outer = 0;
  double T = 0.0;
  double normalization_exponent = 1.5;
  double R = 0.0;
  std::optional<double> constant;
  std::optional<double> prediction;
  std::optional<double> ratio;

  double bracket_spread() const noexcept {
    return count > 0 ? static_cast<double>(count_outer - count_inner) / static_cast<double>(count)
                     : 0.0;
  }
};

struct PairCorrOptions {
  EnumerationOptions enumeration;
  /// Compute the Poisson prediction; when false the ratio stays absent.
  bool with_constant = true;
  MonteCarloOptions monte_carlo;
};

/// R = count / T^(3/2) (quadratic) or count / T (power), with the prediction
/// c T^(1/2) (b - a) resp. c^2 (b - a) when a constant is given.
PairCorrEstimate estimate_from_values(const Form& form, const ValueList& values,
                                      const Window& window, std::optional<double> constant,
                                      int threads = 1);

/// Enumerate, count and compare with the gated Poisson constant. Power forms
/// require 0 < a < b.
PairCorrEstimate pair_correlation(const Form& form, double T, const Window& window,
                                  const PairCorrOptions& opts = {});

struct NearDiagonalCount {
  std::int64_t near = 0;
  std::int64_t total = 0;
  double fraction = 0.0;
};

/// Ordered window pairs with |m_i - n_i| < T^theta in at least one
/// coordinate. Needs a ValueList enumerated with retain_points.
NearDiagonalCount near_diagonal_count(const ValueList& values, const Window& window,
                                      double theta);

NearDiagonalCount near_diagonal_count(const Form& form, double T, const Window& window,
                                      double theta, const EnumerationOptions& opts = {});

}  // namespace diagpc
