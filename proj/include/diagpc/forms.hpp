#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace diagpc {

/// Q(x) = x1^2 + alpha * x2^2 + beta * x3^2 with alpha, beta in [1/2, 1].
class QuadraticForm {
 public:
  QuadraticForm(double alpha, double beta);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

 private:
  double alpha_;
  double beta_;
};

/// F(x) = x1^k + alpha_2 x2^k + ... + alpha_k xk^k, k >= 3, alpha_i in [1/2, 1].
/// The leading coefficient is always 1 and is not stored.
class PowerForm {
 public:
  PowerForm(int k, std::vector<double> coeffs);

  int k() const noexcept { return k_; }
  /// alpha_2 .. alpha_k
  std::span<const double> coeffs() const noexcept { return coeffs_; }

 private:
  int k_;
  std::vector<double> coeffs_;
};

using Form = std::variant<QuadraticForm, PowerForm>;

int dimension(const Form& form) noexcept;
int degree(const Form& form) noexcept;
/// Coefficients including the leading 1: (1, alpha_2, ..., alpha_d).
std::vector<double> coefficients(const Form& form);
bool is_quadratic(const Form& form) noexcept;
/// Same form with its last coefficient (beta resp. alpha_k) replaced.
Form with_last_coefficient(const Form& form, double value);
std::string describe(const Form& form);

/// Largest integer that converts to double without rounding.
inline constexpr std::int64_t kExactIntegerLimit = std::int64_t{1} << 53;

/// x^d in exact integer arithmetic; throws CapacityError beyond 2^53.
std::int64_t exact_power(std::int64_t x, int d);

/// x1^d + sum alpha_i xi^d. Each pure power is exact before the coefficient
/// multiply; terms are accumulated left to right.
double evaluate(const Form& form, std::span<const std::int64_t> point);

/// Half-open window [a, b) with center xi and half-width delta.
class Window {
 public:
  Window(double a, double b);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double xi() const noexcept { return 0.5 * (a_ + b_); }
  double delta() const noexcept { return 0.5 * (b_ - a_); }
  double width() const noexcept { return b_ - a_; }
  bool contains(double d) const noexcept { return a_ <= d && d < b_; }

  static Window centered(double center, double width);

 private:
  double a_;
  double b_;
};

struct SampleMode {
  enum class Kind { quadratic, power };
  Kind kind = Kind::quadratic;
  int k = 2;

  static SampleMode quadratic() { return {Kind::quadratic, 2}; }
  static SampleMode power(int k) { return {Kind::power, k}; }
};

struct ParameterSample {
  std::uint64_t seed = 0;
  std::vector<Form> forms;
};

/// n forms with independent uniform coefficients in [1/2, 1]; form i uses
/// counter stream i, coefficient j uses counter j.
ParameterSample sample_parameters(std::uint64_t seed, std::size_t n, SampleMode mode);

}  // namespace diagpc
