#include "ellvol/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ellvol {

Exponent Exponent::finite(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError("exponent must be a positive finite number or inf");
  }
  return Exponent{value};
}

Exponent Exponent::parse(std::string_view text) {
  std::string lowered(text);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lowered == "inf" || lowered == "infinity" || lowered == "+inf") return infinity();
  double value = 0.0;
  const auto* first = lowered.data();
  const auto* last = lowered.data() + lowered.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw DomainError("cannot parse exponent '" + std::string(text) + "'");
  }
  return finite(value);
}

std::string Exponent::to_string() const {
  if (is_infinite()) return "inf";
  std::ostringstream out;
  out.precision(17);
  out << value_;
  return out.str();
}

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoefficients = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_log_gamma(double x) {
  // Evaluates ln Γ(x) for x >= 1/2.
  const double xm1 = x - 1.0;
  double series = kLanczosCoefficients[0];
  for (std::size_t i = 1; i < kLanczosCoefficients.size(); ++i) {
    series += kLanczosCoefficients[i] / (xm1 + static_cast<double>(i));
  }
  const double t = xm1 + kLanczosG + 0.5;
  constexpr double half_log_two_pi = 0.91893853320467274178032973640562;
  return half_log_two_pi + (xm1 + 0.5) * std::log(t) - t + std::log(series);
}

void check_moment_args(const Exponent& p, double q) {
  if (std::isnan(q) || q < 0.0) throw DomainError("moment order must be >= 0");
  if (q == kInf && p.is_finite()) {
    throw DomainError("infinite moment order requires p = inf");
  }
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma requires a positive finite argument");
  }
  if (x < 0.5) {
    // Γ(x)Γ(1-x) = π / sin(πx)
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) -
           lanczos_log_gamma(1.0 - x);
  }
  return lanczos_log_gamma(x);
}

double moment(const Exponent& p, double q) {
  check_moment_args(p, q);
  if (q == 0.0) return 1.0;
  if (p.is_infinite()) return q == kInf ? 0.0 : 1.0 / (q + 1.0);
  const double pv = p.value();
  return std::exp((q / pv) * std::log(pv) + log_gamma((q + 1.0) / pv) - log_gamma(1.0 / pv));
}

double covariance(const Exponent& p, double q, double r) {
  check_moment_args(p, q);
  check_moment_args(p, r);
  if (p.is_infinite() && (q == kInf || r == kInf)) return 0.0;
  return moment(p, q + r) - moment(p, q) * moment(p, r);
}

double central_variance(const Exponent& p, double q) { return covariance(p, q, q); }

MomentSet moment_set(const Exponent& p, double q) {
  const double cpq = p.is_infinite() ? 0.0 : covariance(p, p.value(), q);
  return MomentSet{p, q, moment(p, q), central_variance(p, q), cpq};
}

double log_ball_volume(long long n, const Exponent& p) {
  if (n < 1) throw DomainError("dimension must be >= 1");
  const auto nd = static_cast<double>(n);
  if (p.is_infinite()) return nd * std::numbers::ln2;
  const double inv = 1.0 / p.value();
  return nd * (std::numbers::ln2 + log_gamma(1.0 + inv)) - log_gamma(1.0 + nd * inv);
}

double normalized_radius_log(long long n, const Exponent& p) {
  return -log_ball_volume(n, p) / static_cast<double>(n);
}

double threshold_constant(const Exponent& p, double q) {
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw DomainError("threshold constant requires finite q > 0");
  }
  const double inv_q = 1.0 / q;
  if (p.is_infinite()) {
    return std::exp(-log_gamma(1.0 + inv_q) + inv_q * (std::log((q + 1.0) / q) - 1.0));
  }
  const double pv = p.value();
  const double inv_p = 1.0 / pv;
  const double log_a = (1.0 + inv_q) * log_gamma(1.0 + inv_p) - log_gamma(1.0 + inv_q) -
                       inv_q * log_gamma((q + 1.0) * inv_p) + (inv_p - inv_q) +
                       inv_q * std::log(pv / q);
  return std::exp(log_a);
}

double normal_cdf(double x) {
  if (std::isnan(x)) return x;
  return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

}  // namespace ellvol
