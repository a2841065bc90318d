#include "diagpc/forms.hpp"

#include <cmath>
#include <sstream>

#include "diagpc/errors.hpp"
#include "diagpc/rng.hpp"

namespace diagpc {

namespace {

void check_coefficient(double c, const char* name) {
  if (!(c >= 0.5 && c <= 1.0)) {
    std::ostringstream msg;
    msg << "coefficient " << name << " = " << c << " outside [1/2, 1]";
    throw ConfigError(msg.str());
  }
}

}  // namespace

QuadraticForm::QuadraticForm(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  check_coefficient(alpha, "alpha");
  check_coefficient(beta, "beta");
}

PowerForm::PowerForm(int k, std::vector<double> coeffs) : k_(k), coeffs_(std::move(coeffs)) {
  if (k < 3) throw ConfigError("power form needs degree k >= 3, got " + std::to_string(k));
  if (coeffs_.size() != static_cast<std::size_t>(k - 1)) {
    throw ConfigError("power form of degree " + std::to_string(k) + " needs " +
                      std::to_string(k - 1) + " coefficients, got " +
                      std::to_string(coeffs_.size()));
  }
  for (double c : coeffs_) check_coefficient(c, "alpha_i");
}

int dimension(const Form& form) noexcept {
  return std::holds_alternative<QuadraticForm>(form) ? 3 : std::get<PowerForm>(form).k();
}

int degree(const Form& form) noexcept {
  return std::holds_alternative<QuadraticForm>(form) ? 2 : std::get<PowerForm>(form).k();
}

bool is_quadratic(const Form& form) noexcept {
  return std::holds_alternative<QuadraticForm>(form);
}

std::vector<double> coefficients(const Form& form) {
  if (const auto* q = std::get_if<QuadraticForm>(&form)) return {1.0, q->alpha(), q->beta()};
  const auto& p = std::get<PowerForm>(form);
  std::vector<double> out{1.0};
  out.insert(out.end(), p.coeffs().begin(), p.coeffs().end());
  return out;
}

Form with_last_coefficient(const Form& form, double value) {
  if (const auto* q = std::get_if<QuadraticForm>(&form)) return QuadraticForm(q->alpha(), value);
  const auto& p = std::get<PowerForm>(form);
  std::vector<double> c(p.coeffs().begin(), p.coeffs().end());
  c.back() = value;
  return PowerForm(p.k(), std::move(c));
}

std::string describe(const Form& form) {
  std::ostringstream out;
  out.precision(12);
  if (const auto* q = std::get_if<QuadraticForm>(&form)) {
    out << "x1^2 + " << q->alpha() << "*x2^2 + " << q->beta() << "*x3^2";
    return out.str();
  }
  const auto& p = std::get<PowerForm>(form);
  out << "x1^" << p.k();
  for (int i = 0; i < p.k() - 1; ++i) {
    out << " + " << p.coeffs()[static_cast<std::size_t>(i)] << "*x" << i + 2 << "^" << p.k();
  }
  return out.str();
}

std::int64_t exact_power(std::int64_t x, int d) {
  if (x < 0) throw DomainError("exact_power expects a nonnegative base");
  std::int64_t r = 1;
  for (int i = 0; i < d; ++i) {
    if (x != 0 && r > kExactIntegerLimit / x) {
      throw CapacityError("coordinate power " + std::to_string(x) + "^" + std::to_string(d) +
                          " exceeds the exact-integer limit 2^53");
    }
    r *= x;
  }
  if (r > kExactIntegerLimit) {
    throw CapacityError("coordinate power exceeds the exact-integer limit 2^53");
  }
  return r;
}

double evaluate(const Form& form, std::span<const std::int64_t> point) {
  const int d = dimension(form);
  if (point.size() != static_cast<std::size_t>(d)) {
    throw ConfigError("point has " + std::to_string(point.size()) + " coordinates, form needs " +
                      std::to_string(d));
  }
  const int deg = degree(form);
  const auto c = coefficients(form);
  double acc = static_cast<double>(exact_power(point[0], deg));
  for (int i = 1; i < d; ++i) {
    acc = acc + c[static_cast<std::size_t>(i)] *
                    static_cast<double>(exact_power(point[static_cast<std::size_t>(i)], deg));
  }
  return acc;
}

Window::Window(double a, double b) : a_(a), b_(b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    std::ostringstream msg;
    msg << "window needs finite a < b, got [" << a << ", " << b << ")";
    throw ConfigError(msg.str());
  }
}

Window Window::centered(double center, double width) {
  return Window(center - 0.5 * width, center + 0.5 * width);
}

ParameterSample sample_parameters(std::uint64_t seed, std::size_t n, SampleMode mode) {
  if (n < 1) throw ConfigError("sample_parameters needs n >= 1");
  if (mode.kind == SampleMode::Kind::power && mode.k < 3) {
    throw ConfigError("power mode needs k >= 3");
  }
  ParameterSample sample{seed, {}};
  sample.forms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CounterRng rng(seed, i);
    if (mode.kind == SampleMode::Kind::quadratic) {
      sample.forms.emplace_back(QuadraticForm(rng.uniform(0, 0.5, 1.0), rng.uniform(1, 0.5, 1.0)));
    } else {
      std::vector<double> c(static_cast<std::size_t>(mode.k - 1));
      for (std::size_t j = 0; j < c.size(); ++j) c[j] = rng.uniform(j, 0.5, 1.0);
      sample.forms.emplace_back(PowerForm(mode.k, std::move(c)));
    }
  }
  return sample;
}

}  // namespace diagpc
