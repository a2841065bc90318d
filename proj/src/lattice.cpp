#include "diagpc/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "diagpc/errors.hpp"
#include "diagpc/parallel.hpp"
#include "diagpc/rng.hpp"
#include "diagpc/volume.hpp"

namespace diagpc {

ValueList::ValueList(std::vector<double> sorted_values, double threshold, bool include_zero)
    : values_(std::move(sorted_values)), threshold_(threshold), include_zero_(include_zero) {
  if (!std::is_sorted(values_.begin(), values_.end())) {
    throw ConfigError("ValueList values must be sorted nondecreasing");
  }
  if (!values_.empty() && values_.back() > threshold_) {
    throw ConfigError("ValueList value exceeds its threshold");
  }
}

ValueList::ValueList(std::vector<double> sorted_values,
                     std::vector<std::vector<std::int32_t>> coords, double threshold,
                     bool include_zero)
    : ValueList(std::move(sorted_values), threshold, include_zero) {
  for (const auto& c : coords) {
    if (c.size() != values_.size()) throw ConfigError("ValueList coordinate arrays misaligned");
  }
  coords_ = std::move(coords);
}

namespace {

struct PointKey {
  double value;
  std::uint64_t key;
  friend bool operator<(const PointKey& l, const PointKey& r) noexcept {
    return l.value < r.value || (l.value == r.value && l.key < r.key);
  }
};

/// Odometer over lattice points below T. The chain of partial sums is
/// evaluated exactly as `evaluate` does, and a level stops as soon as its
/// smallest completion exceeds T (rounded addition is monotone).
class LatticeWalker {
 public:
  LatticeWalker(const Form& form, double T, bool include_zero)
      : d_(dimension(form)), c_(coefficients(form)), T_(T), start_(include_zero ? 0 : 1) {
    const int deg = degree(form);
    const double cmin = *std::min_element(c_.begin(), c_.end());
    const double reach = std::pow(std::max(T, 0.0) / cmin, 1.0 / deg);
    if (!(reach < 1e15)) throw CapacityError("threshold too large for lattice enumeration");
    max_coord_ = static_cast<std::int64_t>(std::floor(reach)) + 3;
    pw_.resize(static_cast<std::size_t>(max_coord_) + 1);
    for (std::int64_t x = 0; x <= max_coord_; ++x) {
      pw_[static_cast<std::size_t>(x)] = static_cast<double>(exact_power(x, deg));
    }
    min_tail_.assign(static_cast<std::size_t>(d_), 0.0);
    coords_.assign(static_cast<std::size_t>(d_), 0);
  }

  std::int64_t start() const noexcept { return start_; }
  std::int64_t max_coord() const noexcept { return max_coord_; }
  int dim() const noexcept { return d_; }

  /// Visits every point with first coordinate in [x1_lo, x1_hi].
  template <class Emit>
  void walk(std::int64_t x1_lo, std::int64_t x1_hi, Emit&& emit) {
    level(0, 0.0, x1_lo, x1_hi, emit);
  }

  const std::vector<std::int64_t>& coords() const noexcept { return coords_; }

 private:
  double smallest_completion(int lvl, double v) const noexcept {
    const double p = pw_[static_cast<std::size_t>(start_)];
    for (int j = lvl + 1; j < d_; ++j) v = v + c_[static_cast<std::size_t>(j)] * p;
    return v;
  }

  template <class Emit>
  void level(int lvl, double partial, std::int64_t lo, std::int64_t hi, Emit& emit) {
    const double c = c_[static_cast<std::size_t>(lvl)];
    for (std::int64_t x = lo; x <= hi; ++x) {
      if (x > max_coord_) throw NumericalAuditError("lattice walk overran its power table");
      const double p = pw_[static_cast<std::size_t>(x)];
      const double v = (lvl == 0) ? p : partial + c * p;
      if (smallest_completion(lvl, v) > T_) break;
      coords_[static_cast<std::size_t>(lvl)] = x;
      if (lvl + 1 == d_) {
        emit(v);
      } else {
        level(lvl + 1, v, start_, std::numeric_limits<std::int64_t>::max(), emit);
      }
    }
  }

  int d_;
  std::vector<double> c_;
  double T_;
  std::int64_t start_;
  std::int64_t max_coord_ = 0;
  std::vector<double> pw_;
  std::vector<double> min_tail_;
  std::vector<std::int64_t> coords_;
};

std::vector<std::pair<std::int64_t, std::int64_t>> first_coordinate_chunks(std::int64_t lo,
                                                                           std::int64_t hi,
                                                                           std::size_t chunks) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  if (hi < lo) return out;
  const auto span = static_cast<std::size_t>(hi - lo + 1);
  chunks = std::clamp<std::size_t>(chunks, 1, span);
  for (std::size_t c = 0; c < chunks; ++c) {
    const auto a = lo + static_cast<std::int64_t>(span * c / chunks);
    const auto b = lo + static_cast<std::int64_t>(span * (c + 1) / chunks) - 1;
    if (a <= b) out.emplace_back(a, b);
  }
  return out;
}

std::int64_t first_coordinate_max(double T, int deg) {
  return static_cast<std::int64_t>(std::floor(std::pow(std::max(T, 0.0), 1.0 / deg))) + 1;
}

std::size_t resolve_chunks(const EnumerationOptions& opts) {
  if (opts.chunks > 0) return opts.chunks;
  return opts.threads <= 1 ? 1 : static_cast<std::size_t>(4 * opts.threads);
}

template <class T>
void merge_sorted_runs(std::vector<T>& data, std::vector<std::size_t> bounds) {
  // bounds: run starts plus data.size() at the end
  while (bounds.size() > 2) {
    std::vector<std::size_t> next{bounds.front()};
    for (std::size_t i = 0; i + 2 < bounds.size(); i += 2) {
      std::inplace_merge(data.begin() + static_cast<std::ptrdiff_t>(bounds[i]),
                         data.begin() + static_cast<std::ptrdiff_t>(bounds[i + 1]),
                         data.begin() + static_cast<std::ptrdiff_t>(bounds[i + 2]));
      next.push_back(bounds[i + 2]);
    }
    if (bounds.size() % 2 == 0) next.push_back(bounds.back());
    bounds = std::move(next);
  }
}

void check_capacity(const Form& form, double T, const EnumerationOptions& opts) {
  const double est = estimate_point_count(form, T);
  if (est > static_cast<double>(opts.memory_cap)) {
    std::ostringstream msg;
    msg << "estimated " << static_cast<std::uint64_t>(est) << " lattice values exceed the memory cap "
        << opts.memory_cap;
    throw CapacityError(msg.str());
  }
}

}  // namespace

double estimate_point_count(const Form& form, double T) {
  if (T <= 0) return 0.0;
  return unit_volume_closed_form(form) *
         std::pow(T, static_cast<double>(dimension(form)) / degree(form));
}

ValueList enumerate_values(const Form& form, double T, const EnumerationOptions& opts) {
  if (!std::isfinite(T)) throw ConfigError("threshold T must be finite");
  check_capacity(form, T, opts);
  const int d = dimension(form);
  const int deg = degree(form);
  const std::int64_t start = opts.include_zero ? 0 : 1;
  const auto chunks =
      first_coordinate_chunks(start, first_coordinate_max(T, deg), resolve_chunks(opts));

  if (!opts.retain_points) {
    std::vector<std::vector<double>> parts(chunks.size());
    parallel_for(chunks.size(), opts.threads, [&](std::size_t c) {
      LatticeWalker walker(form, T, opts.include_zero);
      auto& buf = parts[c];
      walker.walk(chunks[c].first, chunks[c].second, [&](double v) {
        if (buf.size() >= opts.memory_cap) throw CapacityError("lattice values exceed the memory cap");
        buf.push_back(v);
      });
      std::sort(buf.begin(), buf.end());
    });
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    if (total > opts.memory_cap) throw CapacityError("lattice values exceed the memory cap");
    std::vector<double> all;
    all.reserve(total);
    std::vector<std::size_t> bounds;
    for (auto& p : parts) {
      bounds.push_back(all.size());
      all.insert(all.end(), p.begin(), p.end());
      std::vector<double>().swap(p);
    }
    bounds.push_back(all.size());
    merge_sorted_runs(all, std::move(bounds));
    return ValueList(std::move(all), T, opts.include_zero);
  }

  const LatticeWalker probe(form, T, opts.include_zero);
  const int bits = std::bit_width(static_cast<std::uint64_t>(probe.max_coord()));
  if (bits * d > 64 || probe.max_coord() > std::numeric_limits<std::int32_t>::max()) {
    throw CapacityError("points mode cannot pack " + std::to_string(d) + " coordinates of " +
                        std::to_string(bits) + " bits");
  }
  std::vector<std::vector<PointKey>> parts(chunks.size());
  parallel_for(chunks.size(), opts.threads, [&](std::size_t c) {
    LatticeWalker walker(form, T, opts.include_zero);
    auto& buf = parts[c];
    walker.walk(chunks[c].first, chunks[c].second, [&](double v) {
      if (buf.size() >= opts.memory_cap) throw CapacityError("lattice values exceed the memory cap");
      std::uint64_t key = 0;
      for (auto x : walker.coords()) key = (key << bits) | static_cast<std::uint64_t>(x);
      buf.push_back({v, key});
    });
    std::sort(buf.begin(), buf.end());
  });
  std::vector<PointKey> all;
  std::vector<std::size_t> bounds;
  {
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    if (total > opts.memory_cap) throw CapacityError("lattice values exceed the memory cap");
    all.reserve(total);
    for (auto& p : parts) {
      bounds.push_back(all.size());
      all.insert(all.end(), p.begin(), p.end());
      std::vector<PointKey>().swap(p);
    }
    bounds.push_back(all.size());
  }
  merge_sorted_runs(all, std::move(bounds));

  std::vector<double> values(all.size());
  std::vector<std::vector<std::int32_t>> coords(static_cast<std::size_t>(d),
                                                std::vector<std::int32_t>(all.size()));
  const std::uint64_t mask = (bits == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
  for (std::size_t n = 0; n < all.size(); ++n) {
    values[n] = all[n].value;
    std::uint64_t key = all[n].key;
    for (int i = d - 1; i >= 0; --i) {
      coords[static_cast<std::size_t>(i)][n] = static_cast<std::int32_t>(key & mask);
      key >>= bits;
    }
  }
  return ValueList(std::move(values), std::move(coords), T, opts.include_zero);
}

PointCount count_points(const Form& form, double T, const EnumerationOptions& opts,
                        std::optional<double> unit_volume) {
  check_capacity(form, T, opts);
  const std::int64_t start = opts.include_zero ? 0 : 1;
  const auto chunks = first_coordinate_chunks(start, first_coordinate_max(T, degree(form)),
                                              resolve_chunks(opts));
  std::vector<std::uint64_t> counts(chunks.size(), 0);
  parallel_for(chunks.size(), opts.threads, [&](std::size_t c) {
    LatticeWalker walker(form, T, opts.include_zero);
    walker.walk(chunks[c].first, chunks[c].second, [&](double) { ++counts[c]; });
  });
  PointCount out;
  for (auto n : counts) out.count += n;
  out.unit_volume = unit_volume ? *unit_volume : volume_unit(form).value;
  out.predicted =
      out.unit_volume * std::pow(T, static_cast<double>(dimension(form)) / degree(form));
  out.ratio = out.predicted > 0 ? static_cast<double>(out.count) / out.predicted : 0.0;
  return out;
}

std::int64_t BoxInterval::first() const {
  return static_cast<std::int64_t>(std::ceil(lo()));
}

std::int64_t BoxInterval::last() const {
  return static_cast<std::int64_t>(std::floor(hi()));
}

std::int64_t BoxInterval::count() const {
  return std::max<std::int64_t>(0, last() - first() + 1);
}

double BoxPair::k0() const {
  const auto& u = I.back();
  const auto& v = J.back();
  return std::pow(u.center, degree) - std::pow(v.center, degree);
}

BoxPair box_localize(const Form& form, double T, double eps, std::uint64_t seed,
                     const BoxLocalizeOptions& opts) {
  const int d = dimension(form);
  const int deg = degree(form);
  const double e = 1.0 / deg;
  if (!(eps > 0 && eps < e / 3.0)) {
    std::ostringstream msg;
    msg << "box_localize needs 0 < eps < " << e / 3.0 << ", got " << eps;
    throw ConfigError(msg.str());
  }
  const double half = std::pow(T, e - 3 * eps);
  if (!(half >= 2.0)) {
    std::ostringstream msg;
    msg << "box_localize infeasible: half-width T^(" << e - 3 * eps << ") = " << half
        << " < 2 for T = " << T << ", eps = " << eps;
    throw ConfigError(msg.str());
  }
  const double lower = std::pow(T, e - eps);
  const double separation = lower;
  const double upper = opts.ambient_factor * std::pow(T, e) - half;
  if (!(upper - lower > separation)) {
    std::ostringstream msg;
    msg << "box_localize infeasible: center range (" << lower << ", " << upper
        << "] cannot hold two centers separated by " << separation;
    throw ConfigError(msg.str());
  }

  BoxPair boxes;
  boxes.degree = deg;
  boxes.T = T;
  boxes.eps = eps;
  RngStream rng(seed, 0x6c6f63616c697a65ULL);
  int attempts = 0;
  for (int i = 0; i < d; ++i) {
    for (;;) {
      if (++attempts > opts.max_attempts) {
        throw ConfigError("box_localize: no separated centers after " +
                          std::to_string(opts.max_attempts) + " attempts");
      }
      double u = rng.uniform(lower, upper);
      double v = rng.uniform(lower, upper);
      if (!(u > lower && v > lower) || !(std::abs(u - v) > separation)) continue;
      const bool distinguished = (i == d - 1);
      if (distinguished ? (u < v) : (u > v)) std::swap(u, v);
      boxes.I.push_back({u, half});
      boxes.J.push_back({v, half});
      break;
    }
  }
  return boxes;
}

std::pair<ValueList, ValueList> box_values(const Form& form, const BoxPair& boxes) {
  const int d = dimension(form);
  if (boxes.dimension() != d || static_cast<int>(boxes.J.size()) != d) {
    throw ConfigError("box pair dimension does not match the form");
  }
  auto side = [&](const std::vector<BoxInterval>& box) {
    std::vector<double> values;
    std::uint64_t total = 1;
    for (const auto& iv : box) {
      total *= static_cast<std::uint64_t>(iv.count());
      if (iv.count() > 0 && iv.first() < 0) throw DomainError("box extends below zero");
    }
    if (total == 0) return ValueList({}, std::numeric_limits<double>::infinity(), true);
    if (total > (std::uint64_t{1} << 31)) throw CapacityError("box holds too many points");
    values.reserve(total);
    std::vector<std::int64_t> x(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = box[static_cast<std::size_t>(i)].first();
    for (;;) {
      values.push_back(evaluate(form, x));
      int i = d - 1;
      while (i >= 0 && x[static_cast<std::size_t>(i)] == box[static_cast<std::size_t>(i)].last()) {
        x[static_cast<std::size_t>(i)] = box[static_cast<std::size_t>(i)].first();
        --i;
      }
      if (i < 0) break;
      ++x[static_cast<std::size_t>(i)];
    }
    std::sort(values.begin(), values.end());
    return ValueList(std::move(values), std::numeric_limits<double>::infinity(), true);
  };
  return {side(boxes.I), side(boxes.J)};
}

namespace {

constexpr char kDumpMagic[8] = {'F', 'S', 'T', 'V', 'A', 'L', 'S', '1'};

void put_u64_le(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, 8);
}

std::uint64_t get_u64_le(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw Error("value dump truncated");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

}  // namespace

void write_value_dump(std::ostream& out, std::span<const double> values) {
  out.write(kDumpMagic, 8);
  put_u64_le(out, values.size());
  for (double v : values) put_u64_le(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw Error("value dump write failed");
}

std::vector<double> read_value_dump(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || !std::equal(magic, magic + 8, kDumpMagic)) throw Error("not a value dump (bad magic)");
  const std::uint64_t n = get_u64_le(in);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t i = 0; i < n; ++i) values.push_back(std::bit_cast<double>(get_u64_le(in)));
  return values;
}

void save_value_dump(const std::string& path, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_value_dump(out, values);
}

std::vector<double> load_value_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_value_dump(in);
}

}  // namespace diagpc
