#pragma once

#include <cstddef>
#include <string_view>

namespace ellvol {

/// One row of an exact-vs-predicted table.
struct AsymptoticComparison {
  std::size_t n = 0;
  double exact = 0.0;
  double predicted = 0.0;
  double rel_error = 0.0;  ///< |exact/predicted - 1|; NaN when predicted = 0
};

[[nodiscard]] AsymptoticComparison compare(std::size_t n, double exact, double predicted);

/// n!^{alpha/n}, from a compensated sum of ln i.
[[nodiscard]] double factorial_power_exact(double alpha, std::size_t n);
/// (n/e)^alpha · (1 + alpha·ln n / (2n)); needs n >= 2.
[[nodiscard]] double factorial_power_asym(double alpha, std::size_t n);

/// Σ_{i=1}^n i^alpha · ln(i+1)^beta, compensated.
[[nodiscard]] double sum_power_log_exact(double alpha, double beta, std::size_t n);
/// Same sum accumulated from i = n down to 1.
[[nodiscard]] double sum_power_log_exact_reverse(double alpha, double beta, std::size_t n);

/// Growth regime of Σ i^alpha ln(i+1)^beta.
enum class PowerLogRegime {
  convergent,  ///< alpha < -1, or alpha = -1 and beta < -1: bounded, no leading term
  log_log,     ///< alpha = beta = -1
  log_power,   ///< alpha = -1, beta > -1
  power_log,   ///< alpha > -1, beta != 0
  power,       ///< alpha > -1, beta = 0
};

[[nodiscard]] std::string_view to_string(PowerLogRegime regime);
[[nodiscard]] PowerLogRegime power_log_regime(double alpha, double beta);

struct PowerLogAsymptote {
  PowerLogRegime regime;
  double value;  ///< leading-order prediction; NaN for the convergent regime
  [[nodiscard]] bool divergent() const { return regime != PowerLogRegime::convergent; }
};

/// Leading-order prediction of the power-log sum; needs n >= 2.
[[nodiscard]] PowerLogAsymptote sum_power_log_asym(double alpha, double beta, std::size_t n);

/// n·ln(n+1)^beta · Σ_{k<terms} (-1)^k (beta)_k / ln(n+1)^k. beta = 0 is rejected.
[[nodiscard]] double sum_log_pow_expansion(double beta, std::size_t n, unsigned terms);

/// Falling factorial beta(beta-1)...(beta-k+1).
[[nodiscard]] double falling_factorial(double beta, unsigned k);

/// (Π_{i=1}^n ln(i+1))^{1/n}; needs n >= 2.
[[nodiscard]] double prod_log_exact(std::size_t n);
/// L(1 - 1/L - 1/(2L²) - 7/(6L³) - 95/(24L⁴)), L = ln(n+1); needs n >= 2.
[[nodiscard]] double prod_log_asym(std::size_t n);

}  // namespace ellvol
