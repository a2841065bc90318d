#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "diagpc/forms.hpp"
#include "diagpc/lattice.hpp"

namespace diagpc {

/// {alpha in [1/2, 1]^n : |offset + sum c_i alpha_i| < width}
struct SlabSpec {
  std::vector<double> coeffs;
  double offset = 0.0;
  double width = 0.0;
};

enum class SlabMethod { exact_1d, monte_carlo };

struct SlabMeasure {
  double measure = 0.0;
  double std_error = 0.0;
  /// min((1/2)^n, 2 width / max|c_i| (1/2)^(n-1))
  double bound = 0.0;
  SlabMethod method = SlabMethod::exact_1d;
  std::uint64_t samples = 0;
};

SlabMeasure slab_measure(const SlabSpec& spec, SlabMethod method, std::uint64_t samples = 1'000'000,
                         std::uint64_t seed = 0);

struct ExcludedRegimeSum {
  double T = 0.0;
  double theta = 0.0;
  double reach = 0.0;         ///< T^(1/k - theta)
  double main = 0.0;          ///< pairs with 1 <= |m1 - n1| < reach
  double diagonal = 0.0;      ///< the m1 = n1 stratum
  double all_pairs = 0.0;     ///< every pair m != n
  std::uint64_t main_pairs = 0;
  std::uint64_t diagonal_pairs = 0;
};

/// (1/T) sum 1 / sum_i |m_i^k - n_i^k| over ordered pairs of points of the cube
/// 1 <= m_i <= (T / alpha_i)^(1/k), split by regime. Exact integer histograms
/// per coordinate; requires 0 < theta < 1/k.
ExcludedRegimeSum excluded_regime_sum(const PowerForm& form, double T, double theta);

struct SeparationReport {
  bool passed = true;
  std::vector<std::string> failures;
  double k0 = 0.0;
  double k0_floor = 0.0;          ///< T^(1 - deg eps)
  double min_separation = 0.0;    ///< min_i |u_i - v_i|
  double separation_floor = 0.0;  ///< T^(1/deg - eps)
  double corner_max = 0.0;        ///< max over corners of |x^deg - y^deg - k0|
  double corner_scale = 0.0;      ///< T^(1 - 3 eps)
  double corner_ratio = 0.0;
  double corner_constant = 0.0;   ///< 2 deg 2^(deg-1) + 1
};

/// Checks a box pair against its localization requirements; never throws on
/// a violation.
SeparationReport separation_audit(const BoxPair& boxes, double T, double eps);

}  // namespace diagpc
