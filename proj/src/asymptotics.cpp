#include "ellvol/asymptotics.hpp"

#include <cmath>
#include <limits>

#include "ellvol/special_functions.hpp"
#include "ellvol/summation.hpp"

namespace ellvol {

namespace {

void require_asymptotic_n(std::size_t n) {
  if (n < 2) throw DomainError("asymptotic predictors need n >= 2");
}

double power_log_term(double alpha, double beta, std::size_t i) {
  const auto x = static_cast<double>(i);
  double term = std::pow(x, alpha);
  if (beta != 0.0) term *= std::pow(std::log1p(x), beta);
  return term;
}

}  // namespace

AsymptoticComparison compare(std::size_t n, double exact, double predicted) {
  const double rel = predicted == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                      : std::abs(exact / predicted - 1.0);
  return {n, exact, predicted, rel};
}

double factorial_power_exact(double alpha, std::size_t n) {
  if (n == 0) throw DomainError("n must be >= 1");
  CompensatedSum log_factorial;
  for (std::size_t i = 2; i <= n; ++i) log_factorial += std::log(static_cast<double>(i));
  return std::exp(alpha * log_factorial.value() / static_cast<double>(n));
}

double factorial_power_asym(double alpha, std::size_t n) {
  require_asymptotic_n(n);
  const auto x = static_cast<double>(n);
  return std::pow(x / std::exp(1.0), alpha) * (1.0 + alpha * std::log(x) / (2.0 * x));
}

double sum_power_log_exact(double alpha, double beta, std::size_t n) {
  if (n == 0) throw DomainError("n must be >= 1");
  CompensatedSum sum;
  for (std::size_t i = 1; i <= n; ++i) sum += power_log_term(alpha, beta, i);
  return sum.value();
}

double sum_power_log_exact_reverse(double alpha, double beta, std::size_t n) {
  if (n == 0) throw DomainError("n must be >= 1");
  CompensatedSum sum;
  for (std::size_t i = n; i >= 1; --i) sum += power_log_term(alpha, beta, i);
  return sum.value();
}

std::string_view to_string(PowerLogRegime regime) {
  switch (regime) {
    case PowerLogRegime::convergent: return "convergent";
    case PowerLogRegime::log_log: return "log_log";
    case PowerLogRegime::log_power: return "log_power";
    case PowerLogRegime::power_log: return "power_log";
    case PowerLogRegime::power: return "power";
  }
  return "unknown";
}

PowerLogRegime power_log_regime(double alpha, double beta) {
  if (alpha < -1.0 || (alpha == -1.0 && beta < -1.0)) return PowerLogRegime::convergent;
  if (alpha == -1.0) return beta == -1.0 ? PowerLogRegime::log_log : PowerLogRegime::log_power;
  return beta == 0.0 ? PowerLogRegime::power : PowerLogRegime::power_log;
}

PowerLogAsymptote sum_power_log_asym(double alpha, double beta, std::size_t n) {
  require_asymptotic_n(n);
  const auto x = static_cast<double>(n);
  const double log_n1 = std::log1p(x);
  const PowerLogRegime regime = power_log_regime(alpha, beta);
  switch (regime) {
    case PowerLogRegime::convergent:
      return {regime, std::numeric_limits<double>::quiet_NaN()};
    case PowerLogRegime::log_log:
      return {regime, std::log(log_n1)};
    case PowerLogRegime::log_power:
      return {regime, std::pow(log_n1, beta + 1.0) / (beta + 1.0)};
    case PowerLogRegime::power_log: {
      const double a1 = alpha + 1.0;
      return {regime, std::pow(x, a1) * std::pow(log_n1, beta) / a1 *
                          (1.0 - beta / (a1 * log_n1))};
    }
    case PowerLogRegime::power:
      return {regime, std::pow(x, alpha + 1.0) / (alpha + 1.0)};
  }
  return {regime, std::numeric_limits<double>::quiet_NaN()};
}

double falling_factorial(double beta, unsigned k) {
  double out = 1.0;
  for (unsigned l = 0; l < k; ++l) out *= beta - static_cast<double>(l);
  return out;
}

double sum_log_pow_expansion(double beta, std::size_t n, unsigned terms) {
  if (beta == 0.0) throw DomainError("beta = 0 is degenerate: the sum is exactly n");
  if (terms == 0) throw DomainError("expansion needs at least one term");
  require_asymptotic_n(n);
  const auto x = static_cast<double>(n);
  const double log_n1 = std::log1p(x);
  double series = 0.0;
  double inv_power = 1.0;
  for (unsigned k = 0; k < terms; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    series += sign * falling_factorial(beta, k) * inv_power;
    inv_power /= log_n1;
  }
  return x * std::pow(log_n1, beta) * series;
}

double prod_log_exact(std::size_t n) {
  require_asymptotic_n(n);
  CompensatedSum sum;
  for (std::size_t i = 1; i <= n; ++i) sum += std::log(std::log1p(static_cast<double>(i)));
  return std::exp(sum.value() / static_cast<double>(n));
}

double prod_log_asym(std::size_t n) {
  require_asymptotic_n(n);
  const double L = std::log1p(static_cast<double>(n));
  const double inv = 1.0 / L;
  return L * (1.0 - inv - inv * inv / 2.0 - 7.0 * inv * inv * inv / 6.0 -
              95.0 * inv * inv * inv * inv / 24.0);
}

}  // namespace ellvol
