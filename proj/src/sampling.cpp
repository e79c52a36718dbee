#include "ellvol/sampling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace ellvol {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kDeriveSalt = 0xD1B54A32D192ED03ULL;
constexpr double kMaxCentredLog = 600.0;

double pow_abs(double x, double q) {
  const double a = std::abs(x);
  if (q == 1.0) return a;
  if (q == 2.0) return a * a;
  return std::pow(a, q);
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed) {
  std::uint64_t z = seed;
  for (auto& word : state_) {
    z += kGolden;
    word = mix64(z);
  }
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

RandomStream RandomStream::derive(std::uint64_t k) const {
  return RandomStream(mix64(mix64(seed_ ^ kDeriveSalt) + mix64(k + kGolden)));
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = std::rotl(state_[3], 45);
  return result;
}

double RandomStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_ = true;
  return u * f;
}

double sample_log_gamma(double shape, RandomStream& stream) {
  if (!(shape > 0.0) || !std::isfinite(shape)) throw DomainError("gamma shape must be positive");
  if (shape < 1.0) {
    // G_a = G_{a+1} · U^{1/a}
    const double boost = std::log(stream.uniform()) / shape;
    return sample_log_gamma(shape + 1.0, stream) + boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = stream.normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = stream.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
    const double log_v = std::log(v);
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + log_v)) return std::log(d) + log_v;
  }
}

double sample_gamma(double shape, RandomStream& stream) {
  return std::exp(sample_log_gamma(shape, stream));
}

double sample_p_gaussian(const Exponent& p, RandomStream& stream) {
  if (p.is_infinite()) return 2.0 * stream.uniform() - 1.0;
  if (p.value() == 2.0) return stream.normal();
  const double pv = p.value();
  const double log_abs = (std::log(pv) + sample_log_gamma(1.0 / pv, stream)) / pv;
  const double sign = (stream.next_u64() >> 63) ? -1.0 : 1.0;
  return sign * std::exp(log_abs);
}

double log_p_norm(std::span<const double> x, const Exponent& p) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m == 0.0) return -kInf;
  if (p.is_infinite()) return std::log(m);
  const double pv = p.value();
  const double inv_m = 1.0 / m;
  double sum = 0.0;
  for (double v : x) sum += pow_abs(v * inv_m, pv);
  return std::log(m) + std::log(sum) / pv;
}

void sample_uniform_ball(const Exponent& p, RandomStream& stream, std::span<double> out) {
  if (out.empty()) throw DimensionError("ball dimension must be >= 1");
  if (p.is_infinite()) {
    for (double& v : out) v = 2.0 * stream.uniform() - 1.0;
    return;
  }
  double log_norm = -kInf;
  while (log_norm == -kInf) {
    for (double& v : out) v = sample_p_gaussian(p, stream);
    log_norm = log_p_norm(out, p);
  }
  const double log_radius = std::log(stream.uniform()) / static_cast<double>(out.size());
  const double scale = std::exp(log_radius - log_norm);
  for (double& v : out) v *= scale;
}

std::vector<double> sample_uniform_ball(std::size_t n, const Exponent& p, RandomStream& stream) {
  std::vector<double> out(n);
  sample_uniform_ball(p, stream, out);
  return out;
}

double log_scaled_q_norm(std::span<const double> x, const SemiAxesRow& row, double q) {
  if (x.size() != row.size()) {
    throw DimensionError("vector has " + std::to_string(x.size()) + " entries, row has " +
                         std::to_string(row.size()));
  }
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("q must be positive and finite");
  const auto ls = row.log_sigma();
  double m = -kInf;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) m = std::max(m, std::log(std::abs(x[i])) - ls[i]);
  }
  if (m == -kInf) return m;
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) sum += std::exp(q * (std::log(std::abs(x[i])) - ls[i] - m));
  }
  return m + std::log(sum) / q;
}

double scaled_q_norm(std::span<const double> x, const SemiAxesRow& row, double q) {
  return std::exp(log_scaled_q_norm(x, row, q));
}

double membership_log_threshold(const Exponent& p, double q, const SemiAxesRow& row, double t) {
  if (!(t > 0.0)) throw DomainError("membership threshold needs t > 0");
  const auto n = static_cast<long long>(row.size());
  return std::log(t) + normalized_radius_log(n, Exponent::finite(q)) -
         normalized_radius_log(n, p) - row.mean_log();
}

ScaledNormKernel::ScaledNormKernel(const SemiAxesRow& row, double q)
    : q_(q),
      power_(q == 1.0 ? Power::one : (q == 2.0 ? Power::two : Power::general)),
      mean_log_(row.mean_log()),
      use_weights_(true),
      log_sigma_(row.log_sigma().begin(), row.log_sigma().end()) {
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("q must be positive and finite");
  weights_.resize(log_sigma_.size());
  for (std::size_t i = 0; i < log_sigma_.size(); ++i) {
    const double centred = log_sigma_[i] - mean_log_;
    if (std::abs(centred) > kMaxCentredLog) use_weights_ = false;
    weights_[i] = std::exp(-centred);
  }
}

double ScaledNormKernel::log_norm(std::span<const double> x) const {
  if (x.size() != log_sigma_.size()) throw DimensionError("vector length does not match row");
  if (!use_weights_) {
    return log_scaled_q_norm(x, SemiAxesRow::from_log(log_sigma_), q_);
  }
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i]) * weights_[i]);
  if (m == 0.0) return -kInf;
  const double inv_m = 1.0 / m;
  double sum = 0.0;
  switch (power_) {
    case Power::one:
      for (std::size_t i = 0; i < x.size(); ++i) sum += std::abs(x[i]) * weights_[i] * inv_m;
      break;
    case Power::two:
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double y = x[i] * weights_[i] * inv_m;
        sum += y * y;
      }
      break;
    case Power::general:
      for (std::size_t i = 0; i < x.size(); ++i) {
        sum += std::pow(std::abs(x[i]) * weights_[i] * inv_m, q_);
      }
      break;
  }
  return std::log(m) + std::log(sum) / q_ - mean_log_;
}

}  // namespace ellvol
