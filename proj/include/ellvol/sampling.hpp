#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ellvol/spectra.hpp"
#include "ellvol/special_functions.hpp"

namespace ellvol {

/// Seeded random stream: xoshiro256** (v1.0) seeded through splitmix64.
///
/// The output is a pure function of the seed. `derive(k)` returns an
/// independent child stream determined by (seed, k) only, never by how much
/// of the parent has been consumed. A stream is single-owner; use one
/// derived stream per worker or per sample.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] RandomStream derive(std::uint64_t k) const;

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal (Marsaglia polar method).
  double normal();

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 finalizer.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x);

/// Gamma(shape, 1) variate (Marsaglia–Tsang; U^{1/a} boost for shape < 1).
[[nodiscard]] double sample_gamma(double shape, RandomStream& stream);
/// ln of a Gamma(shape, 1) variate; stays finite where the variate underflows.
[[nodiscard]] double sample_log_gamma(double shape, RandomStream& stream);

/// One draw from the p-generalized Gaussian N_p.
[[nodiscard]] double sample_p_gaussian(const Exponent& p, RandomStream& stream);

/// Fills `out` with a uniform draw from B_p^n, n = out.size().
void sample_uniform_ball(const Exponent& p, RandomStream& stream, std::span<double> out);
[[nodiscard]] std::vector<double> sample_uniform_ball(std::size_t n, const Exponent& p,
                                                      RandomStream& stream);

/// ln ‖x‖_p with max-rescaling; -inf for the zero vector.
[[nodiscard]] double log_p_norm(std::span<const double> x, const Exponent& p);

/// ‖Σ⁻¹x‖_q for Σ = diag(σ), evaluated with max-rescaling in log domain.
[[nodiscard]] double scaled_q_norm(std::span<const double> x, const SemiAxesRow& row, double q);
[[nodiscard]] double log_scaled_q_norm(std::span<const double> x, const SemiAxesRow& row,
                                       double q);

/// L such that r_{n,p}Z ∈ t·nE_{q,σ} iff ln ‖Σ⁻¹Z‖_q <= L.
[[nodiscard]] double membership_log_threshold(const Exponent& p, double q, const SemiAxesRow& row,
                                              double t);

/// Precomputed evaluator of ln ‖Σ⁻¹x‖_q for repeated use on one row.
///
/// Weights are taken relative to the geometric mean of the row so that they
/// stay representable; rows whose centred log-axes leave [-600, 600] fall
/// back to the log-domain path.
class ScaledNormKernel {
 public:
  ScaledNormKernel(const SemiAxesRow& row, double q);

  [[nodiscard]] double log_norm(std::span<const double> x) const;
  [[nodiscard]] std::size_t size() const { return log_sigma_.size(); }

 private:
  enum class Power { one, two, general };

  double q_;
  Power power_;
  double mean_log_;
  bool use_weights_;
  std::vector<double> log_sigma_;
  std::vector<double> weights_;
};

}  // namespace ellvol
