#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ellvol {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Raised when an argument lies outside the domain of a closed-form quantity.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Exponent p ∈ (0, ∞] of a p-ball, p-ellipsoid or p-Gaussian law.
class Exponent {
 public:
  /// Throws DomainError unless 0 < value < ∞.
  static Exponent finite(double value);
  static Exponent infinity() { return Exponent{kInf}; }

  /// Parses a decimal or one of "inf", "infinity" (case-insensitive).
  static Exponent parse(std::string_view text);

  [[nodiscard]] bool is_infinite() const { return value_ == kInf; }
  [[nodiscard]] bool is_finite() const { return !is_infinite(); }
  /// +inf for the infinite exponent.
  [[nodiscard]] double value() const { return value_; }
  /// 1/p, with 1/∞ = 0.
  [[nodiscard]] double reciprocal() const { return is_infinite() ? 0.0 : 1.0 / value_; }

  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Exponent&, const Exponent&) = default;

 private:
  explicit Exponent(double value) : value_(value) {}
  double value_;
};

/// True when the exponent is finite and equal to q.
[[nodiscard]] inline bool same_exponent(const Exponent& p, double q) {
  return p.is_finite() && p.value() == q;
}

/// ln Γ(x) for x > 0 (Lanczos, g = 7, nine coefficients; reflection below 1/2).
[[nodiscard]] double log_gamma(double x);

/// M_p(q) = E|X|^q for X ~ N_p. q may be +inf only when p is infinite.
[[nodiscard]] double moment(const Exponent& p, double q);

/// V_p(q) = Var |X|^q.
[[nodiscard]] double central_variance(const Exponent& p, double q);

/// C_p(q, r) = Cov(|X|^q, |X|^r).
[[nodiscard]] double covariance(const Exponent& p, double q, double r);

/// Moments bundled for one (p, q) pair; `c_pq` is C_p(p, q).
struct MomentSet {
  Exponent p;
  double q;
  double m;
  double v;
  double c_pq;
};

[[nodiscard]] MomentSet moment_set(const Exponent& p, double q);

/// ln vol_n(B_p^n).
[[nodiscard]] double log_ball_volume(long long n, const Exponent& p);

/// ln r_{n,p}, the radius that gives r·B_p^n unit volume.
[[nodiscard]] double normalized_radius_log(long long n, const Exponent& p);

/// Threshold constant A_{p,q} for finite q.
[[nodiscard]] double threshold_constant(const Exponent& p, double q);

/// Standard normal CDF; accepts ±inf.
[[nodiscard]] double normal_cdf(double x);

}  // namespace ellvol
