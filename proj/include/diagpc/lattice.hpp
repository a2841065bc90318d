#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "diagpc/forms.hpp"

namespace diagpc {

/// Sorted multiset of form values at lattice points, optionally with the
/// points themselves (structure of arrays, aligned with the values).
class ValueList {
 public:
  ValueList() = default;
  ValueList(std::vector<double> sorted_values, double threshold, bool include_zero);
  ValueList(std::vector<double> sorted_values, std::vector<std::vector<std::int32_t>> coords,
            double threshold, bool include_zero);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double threshold() const noexcept { return threshold_; }
  bool include_zero() const noexcept { return include_zero_; }

  bool has_points() const noexcept { return !coords_.empty(); }
  int dimension() const noexcept { return static_cast<int>(coords_.size()); }
  std::span<const std::int32_t> coordinate(int i) const {
    return coords_.at(static_cast<std::size_t>(i));
  }

 private:
  std::vector<double> values_;
  std::vector<std::vector<std::int32_t>> coords_;
  double threshold_ = 0.0;
  bool include_zero_ = false;
};

struct EnumerationOptions {
  bool include_zero = false;
  /// Keep lattice points next to the values (needed for near-diagonal diagnostics).
  bool retain_points = false;
  std::uint64_t memory_cap = std::uint64_t{1} << 31;
  int threads = 1;
  /// Number of first-coordinate chunks; 0 picks one per worker (x4 when threaded).
  std::size_t chunks = 0;
};

/// Continuous-volume estimate V(1) * T^(d/deg) of the point count.
double estimate_point_count(const Form& form, double T);

/// All values form(x) <= T over x in Z_{>=1}^d (Z_{>=0}^d with include_zero), sorted.
/// In points mode equal values are ordered by their points lexicographically.
ValueList enumerate_values(const Form& form, double T, const EnumerationOptions& opts = {});

struct PointCount {
  std::uint64_t count = 0;
  double unit_volume = 0.0;
  double predicted = 0.0;  ///< V(1) * T^(d/deg)
  double ratio = 0.0;      ///< count / predicted
};

/// Lattice point count with its continuous-volume prediction. When no unit
/// volume is supplied it is taken from volume_unit (Monte Carlo gated).
PointCount count_points(const Form& form, double T, const EnumerationOptions& opts = {},
                        std::optional<double> unit_volume = std::nullopt);

/// Closed real interval [center - half_width, center + half_width].
struct BoxInterval {
  double center = 0.0;
  double half_width = 0.0;

  double lo() const noexcept { return center - half_width; }
  double hi() const noexcept { return center + half_width; }
  std::int64_t first() const;
  std::int64_t last() const;
  std::int64_t count() const;
};

/// Localized boxes I = prod I_i and J = prod J_i. The last coordinate is the
/// distinguished one (u > v there); in the other coordinates J lies above I.
struct BoxPair {
  int degree = 2;
  double T = 0.0;
  double eps = 0.0;
  std::vector<BoxInterval> I;
  std::vector<BoxInterval> J;

  int dimension() const noexcept { return static_cast<int>(I.size()); }
  /// u^deg - v^deg in the distinguished coordinate.
  double k0() const;
};

struct BoxLocalizeOptions {
  /// Box centers lie in (T^(1/deg - eps), ambient_factor * T^(1/deg) - Delta].
  double ambient_factor = 2.0;
  int max_attempts = 10000;
};

BoxPair box_localize(const Form& form, double T, double eps, std::uint64_t seed,
                     const BoxLocalizeOptions& opts = {});

/// Sorted form values over the integer points of the I box and of the J box.
std::pair<ValueList, ValueList> box_values(const Form& form, const BoxPair& boxes);

/// Binary value dump: "FSTVALS1", little-endian uint64 count, then
/// little-endian IEEE-754 doubles.
void write_value_dump(std::ostream& out, std::span<const double> values);
std::vector<double> read_value_dump(std::istream& in);
void save_value_dump(const std::string& path, std::span<const double> values);
std::vector<double> load_value_dump(const std::string& path);

}  // namespace diagpc
