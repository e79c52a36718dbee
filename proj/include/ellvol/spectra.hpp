#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ellvol/special_functions.hpp"

namespace ellvol {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedFamily : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One row σ_n = (σ_1, …, σ_n) of semi-axes, stored as ln σ_i.
class SemiAxesRow {
 public:
  /// Takes positive, finite semi-axes. Throws DomainError otherwise.
  static SemiAxesRow from_axes(std::span<const double> sigma);
  /// Takes finite logarithms of semi-axes.
  static SemiAxesRow from_log(std::vector<double> log_sigma);
  static SemiAxesRow constant(std::size_t n, double c = 1.0);

  [[nodiscard]] std::size_t size() const { return log_sigma_.size(); }
  [[nodiscard]] std::span<const double> log_sigma() const { return log_sigma_; }
  [[nodiscard]] std::vector<double> axes() const;
  [[nodiscard]] double mean_log() const;

  /// Same row with every axis multiplied by c > 0.
  [[nodiscard]] SemiAxesRow scaled(double c) const;

 private:
  explicit SemiAxesRow(std::vector<double> log_sigma) : log_sigma_(std::move(log_sigma)) {}
  std::vector<double> log_sigma_;
};

struct ConstantAxes {
  double c = 1.0;
};

/// `head` followed by `period` repeated forever.
struct EventuallyPeriodicAxes {
  std::vector<double> head;
  std::vector<double> period;
};

/// σ_i = i^alpha · ln(i+1)^beta.
struct PowerLogAxes {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Rows supplied by the caller; no closed-form limits are known.
struct ExplicitAxes {
  std::function<SemiAxesRow(std::size_t)> rows;
  std::string description;
};

class SpectrumFamily {
 public:
  using Variant = std::variant<ConstantAxes, EventuallyPeriodicAxes, PowerLogAxes, ExplicitAxes>;

  SpectrumFamily(ConstantAxes f);
  SpectrumFamily(EventuallyPeriodicAxes f);
  SpectrumFamily(PowerLogAxes f);
  SpectrumFamily(ExplicitAxes f);

  /// Family whose rows are the initial segments of a fixed row.
  static SpectrumFamily from_row(SemiAxesRow row, std::string description);

  [[nodiscard]] const Variant& kind() const { return kind_; }
  [[nodiscard]] bool is_explicit() const { return std::holds_alternative<ExplicitAxes>(kind_); }
  /// ln σ_i for 1-based index i; not available for explicit families.
  [[nodiscard]] double log_axis(std::size_t i) const;
  [[nodiscard]] std::string describe() const;

 private:
  Variant kind_;
};

[[nodiscard]] SemiAxesRow materialize(const SpectrumFamily& family, std::size_t n);

/// Log-domain sufficient statistics of one row for a fixed q.
struct RowMoments {
  std::size_t n = 0;
  double q = 0.0;
  double mean_log = 0.0;     ///< (1/n) Σ ln σ_i
  double log_sum_q = 0.0;    ///< ln Σ σ_i^{-q}
  double log_sum_2q = 0.0;   ///< ln Σ σ_i^{-2q}
  double log_max_2q = 0.0;   ///< ln max σ_i^{-2q}
};

[[nodiscard]] RowMoments row_moments(const SemiAxesRow& row, double q);
/// Streams the first n axes of a non-explicit family without storing the row.
[[nodiscard]] RowMoments row_moments(const SpectrumFamily& family, std::size_t n, double q);

[[nodiscard]] double f_n(const RowMoments& m);
[[nodiscard]] double g_n(const RowMoments& m);
[[nodiscard]] double flatness_n(const RowMoments& m);
[[nodiscard]] double noether_n(const RowMoments& m);
/// (h_n, z_n) for a finite limit F >= 1.
[[nodiscard]] std::pair<double, double> h_z_n(const RowMoments& m, double F);

[[nodiscard]] double f_n(const SemiAxesRow& row, double q);
[[nodiscard]] double g_n(const SemiAxesRow& row, double q);
[[nodiscard]] double flatness_n(const SemiAxesRow& row, double q);
[[nodiscard]] double noether_n(const SemiAxesRow& row, double q);
[[nodiscard]] std::pair<double, double> h_z_n(const SemiAxesRow& row, double q, double F);

/// ρ_i = τ_i / σ_i: reduces an ellipsoid pair to a ball and one ellipsoid.
[[nodiscard]] SemiAxesRow reduce_pair(const SemiAxesRow& sigma, const SemiAxesRow& tau);

struct FamilyLimits {
  double F = 1.0;               ///< in [1, +inf]
  std::optional<double> G;      ///< in [0, 1]
  std::optional<double> z;      ///< in [-inf, +inf]
  bool threshold_ok = false;
  bool clt_ok = false;
};

/// Closed-form limits for constant, eventually periodic and power-log families.
/// Throws UnsupportedFamily for explicit families.
[[nodiscard]] FamilyLimits family_limits(const SpectrumFamily& family, const Exponent& p, double q);

/// Limiting variance s² of the normalized q-norm statistic.
[[nodiscard]] double s_squared(const Exponent& p, double q, double G);

/// F / A_{p,q}; +inf for F = +inf.
[[nodiscard]] double t_critical(const Exponent& p, double q, double F);

inline constexpr double kCriticalRelTol = 1e-9;

/// Limiting volume of D_p^n ∩ t·nE_{q,σ}; nullopt when the limit is not determined.
[[nodiscard]] std::optional<double> predict_limit(const Exponent& p, double q, double t,
                                                  const FamilyLimits& limits);

}  // namespace ellvol
