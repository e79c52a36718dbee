#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ellvol/sampling.hpp"
#include "ellvol/spectra.hpp"

namespace ellvol {

/// Sample budget and reproducibility controls shared by all estimators.
///
/// Sample j always draws from `RandomStream(seed).derive(j)`, so results
/// depend on (seed, samples) only; `workers` changes wall-clock time, not
/// output.
struct McConfig {
  std::uint64_t samples = 10000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct VolumeEstimate {
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  double ci95_lo = 0.0;
  double ci95_hi = 0.0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  Exponent p = Exponent::infinity();
  double q = 0.0;
  double t = 0.0;
  std::string row;
  unsigned workers = 1;
};

struct ScanRow {
  double t = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::optional<double> predicted;
};

struct ScanTable {
  std::vector<ScanRow> rows;
  std::optional<FamilyLimits> limits;
  double t_crit = kInf;  ///< +inf when unknown
};

struct CltSample {
  std::vector<double> values;
  double g_n = 0.0;
  double s2_theory = 0.0;               ///< s² with the finite-n g_n
  std::optional<double> s2_limit;       ///< s² with the limiting G, when supplied
  std::optional<double> ks;             ///< vs Normal(0, s2_theory); absent when s2_theory = 0
};

/// Wilson score interval at 95% for `hits` out of `samples`.
struct Interval {
  double lo;
  double hi;
};
[[nodiscard]] Interval wilson_interval(std::uint64_t hits, std::uint64_t samples);

/// ln ‖Σ⁻¹Z_j‖_q for N independent Z_j ~ Uni(B_p^n), in sample order.
[[nodiscard]] std::vector<double> sample_log_scaled_norms(const Exponent& p, double q,
                                                          const SemiAxesRow& row,
                                                          const McConfig& config);

/// Monte Carlo estimate of vol_n(D_p^n ∩ t·nE_{q,σ}).
[[nodiscard]] VolumeEstimate estimate_volume(const Exponent& p, double q, const SemiAxesRow& row,
                                             double t, const McConfig& config);

/// Volume estimates along an increasing t grid from one shared sample set.
[[nodiscard]] ScanTable threshold_scan(const Exponent& p, double q, const SpectrumFamily& family,
                                       std::size_t n, std::span<const double> t_grid,
                                       const McConfig& config);

/// Realizations of the centred, normalized q-norm statistic of Z ~ Uni(B_p^n).
[[nodiscard]] CltSample clt_statistic_samples(const Exponent& p, double q, const SemiAxesRow& row,
                                              const McConfig& config,
                                              std::optional<double> limit_G = std::nullopt);

/// Two-sided Kolmogorov–Smirnov distance to Normal(mean, std²).
[[nodiscard]] double ks_distance(std::span<const double> values, double mean, double std);

/// Asymptotic one-sample KS critical value c(α)/√N.
[[nodiscard]] double ks_critical_value(double alpha, std::size_t n);

}  // namespace ellvol
