#include "ellvol/spectra.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>

#include "ellvol/summation.hpp"

namespace ellvol {

namespace {

void require_positive_q(double q) {
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("q must be positive and finite");
}

void require_positive_axes(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string(what) + " must contain positive finite values");
    }
  }
}

// Accumulates RowMoments from a stream of ln σ_i.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(double q) : q_(q) {}

  void add(double log_sigma) {
    ++n_;
    sum_log_ += log_sigma;
    sum_q_.add(-q_ * log_sigma);
    sum_2q_.add(-2.0 * q_ * log_sigma);
  }

  [[nodiscard]] RowMoments finish() const {
    if (n_ == 0) throw DimensionError("row must have at least one entry");
    RowMoments m;
    m.n = n_;
    m.q = q_;
    m.mean_log = sum_log_.value() / static_cast<double>(n_);
    m.log_sum_q = sum_q_.value();
    m.log_sum_2q = sum_2q_.value();
    m.log_max_2q = sum_2q_.max();
    return m;
  }

 private:
  double q_;
  std::size_t n_ = 0;
  CompensatedSum sum_log_;
  LogSumExp sum_q_;
  LogSumExp sum_2q_;
};

// Shortest text that round-trips.
std::string shortest(double v) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, result.ptr);
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += shortest(values[i]);
  }
  return out;
}

bool all_equal(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

// --- SemiAxesRow -----------------------------------------------------------

SemiAxesRow SemiAxesRow::from_axes(std::span<const double> sigma) {
  if (sigma.empty()) throw DimensionError("a row needs at least one semi-axis");
  require_positive_axes(sigma, "semi-axes");
  std::vector<double> logs(sigma.size());
  std::transform(sigma.begin(), sigma.end(), logs.begin(), [](double s) { return std::log(s); });
  return SemiAxesRow{std::move(logs)};
}

SemiAxesRow SemiAxesRow::from_log(std::vector<double> log_sigma) {
  if (log_sigma.empty()) throw DimensionError("a row needs at least one semi-axis");
  for (double v : log_sigma) {
    if (!std::isfinite(v)) throw DomainError("log semi-axes must be finite");
  }
  return SemiAxesRow{std::move(log_sigma)};
}

SemiAxesRow SemiAxesRow::constant(std::size_t n, double c) {
  if (n == 0) throw DimensionError("a row needs at least one semi-axis");
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("constant axis must be positive");
  return SemiAxesRow{std::vector<double>(n, std::log(c))};
}

std::vector<double> SemiAxesRow::axes() const {
  std::vector<double> out(log_sigma_.size());
  std::transform(log_sigma_.begin(), log_sigma_.end(), out.begin(),
                 [](double l) { return std::exp(l); });
  return out;
}

double SemiAxesRow::mean_log() const {
  if (log_sigma_.empty()) throw DimensionError("empty row");
  CompensatedSum sum;
  for (double l : log_sigma_) sum += l;
  return sum.value() / static_cast<double>(log_sigma_.size());
}

SemiAxesRow SemiAxesRow::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("scale must be positive");
  const double shift = std::log(c);
  std::vector<double> logs(log_sigma_);
  for (double& l : logs) l += shift;
  return SemiAxesRow{std::move(logs)};
}

// --- SpectrumFamily --------------------------------------------------------

SpectrumFamily::SpectrumFamily(ConstantAxes f) : kind_(f) {
  if (!(f.c > 0.0) || !std::isfinite(f.c)) throw DomainError("constant axis must be positive");
}

SpectrumFamily::SpectrumFamily(EventuallyPeriodicAxes f) : kind_(std::move(f)) {
  const auto& ep = std::get<EventuallyPeriodicAxes>(kind_);
  if (ep.period.empty()) throw DomainError("period must be nonempty");
  require_positive_axes(ep.head, "head");
  require_positive_axes(ep.period, "period");
}

SpectrumFamily::SpectrumFamily(PowerLogAxes f) : kind_(f) {
  if (!std::isfinite(f.alpha) || !std::isfinite(f.beta)) {
    throw DomainError("power-log exponents must be finite");
  }
}

SpectrumFamily::SpectrumFamily(ExplicitAxes f) : kind_(std::move(f)) {
  if (!std::get<ExplicitAxes>(kind_).rows) throw DomainError("explicit family needs a row provider");
}

SpectrumFamily SpectrumFamily::from_row(SemiAxesRow row, std::string description) {
  auto shared = std::make_shared<const SemiAxesRow>(std::move(row));
  ExplicitAxes e;
  e.description = std::move(description);
  e.rows = [shared](std::size_t n) {
    if (n > shared->size()) {
      throw DimensionError("requested " + std::to_string(n) + " axes but only " +
                           std::to_string(shared->size()) + " are available");
    }
    auto logs = shared->log_sigma().first(n);
    return SemiAxesRow::from_log(std::vector<double>(logs.begin(), logs.end()));
  };
  return SpectrumFamily{std::move(e)};
}

double SpectrumFamily::log_axis(std::size_t i) const {
  if (i == 0) throw DimensionError("axis index is 1-based");
  return std::visit(
      [i](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ConstantAxes>) {
          return std::log(f.c);
        } else if constexpr (std::is_same_v<T, EventuallyPeriodicAxes>) {
          if (i <= f.head.size()) return std::log(f.head[i - 1]);
          return std::log(f.period[(i - f.head.size() - 1) % f.period.size()]);
        } else if constexpr (std::is_same_v<T, PowerLogAxes>) {
          const auto id = static_cast<double>(i);
          double l = f.alpha * std::log(id);
          if (f.beta != 0.0) l += f.beta * std::log(std::log1p(id));
          return l;
        } else {
          throw UnsupportedFamily("explicit family has no per-index axis formula");
        }
      },
      kind_);
}

std::string SpectrumFamily::describe() const {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ConstantAxes>) {
          return "constant:" + shortest(f.c);
        } else if constexpr (std::is_same_v<T, EventuallyPeriodicAxes>) {
          std::string out = "periodic:" + join(f.period);
          if (!f.head.empty()) out += ";head=" + join(f.head);
          return out;
        } else if constexpr (std::is_same_v<T, PowerLogAxes>) {
          return "powerlog:" + shortest(f.alpha) + "," + shortest(f.beta);
        } else {
          return f.description;
        }
      },
      kind_);
}

SemiAxesRow materialize(const SpectrumFamily& family, std::size_t n) {
  if (n == 0) throw DimensionError("n must be >= 1");
  if (const auto* e = std::get_if<ExplicitAxes>(&family.kind())) {
    auto row = e->rows(n);
    if (row.size() != n) throw DimensionError("explicit provider returned a row of wrong length");
    return row;
  }
  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) logs[i] = family.log_axis(i + 1);
  return SemiAxesRow::from_log(std::move(logs));
}

// --- finite-n functionals --------------------------------------------------

RowMoments row_moments(const SemiAxesRow& row, double q) {
  require_positive_q(q);
  MomentAccumulator acc(q);
  for (double l : row.log_sigma()) acc.add(l);
  return acc.finish();
}

RowMoments row_moments(const SpectrumFamily& family, std::size_t n, double q) {
  require_positive_q(q);
  if (family.is_explicit()) return row_moments(materialize(family, n), q);
  if (n == 0) throw DimensionError("n must be >= 1");
  MomentAccumulator acc(q);
  for (std::size_t i = 1; i <= n; ++i) acc.add(family.log_axis(i));
  return acc.finish();
}

double f_n(const RowMoments& m) {
  const double log_n = std::log(static_cast<double>(m.n));
  return std::exp(m.mean_log + (m.log_sum_q - log_n) / m.q);
}

double g_n(const RowMoments& m) {
  const double log_n = std::log(static_cast<double>(m.n));
  return std::exp(m.log_sum_q - 0.5 * log_n - 0.5 * m.log_sum_2q);
}

double flatness_n(const RowMoments& m) {
  const double log_n = std::log(static_cast<double>(m.n));
  return std::exp(2.0 * m.q * m.mean_log - 2.0 * log_n + m.log_sum_2q);
}

double noether_n(const RowMoments& m) { return std::exp(m.log_max_2q - m.log_sum_2q); }

std::pair<double, double> h_z_n(const RowMoments& m, double F) {
  if (!(F >= 1.0) || !std::isfinite(F)) throw DomainError("h_n needs a finite F >= 1");
  const double log_n = std::log(static_cast<double>(m.n));
  const double log_h = m.mean_log + (m.log_sum_q - log_n) / m.q - std::log(F);
  const double prefactor = std::exp(m.log_sum_q - 0.5 * m.log_sum_2q);
  return {std::exp(log_h), prefactor * std::expm1(log_h)};
}

double f_n(const SemiAxesRow& row, double q) { return f_n(row_moments(row, q)); }
double g_n(const SemiAxesRow& row, double q) { return g_n(row_moments(row, q)); }
double flatness_n(const SemiAxesRow& row, double q) { return flatness_n(row_moments(row, q)); }
double noether_n(const SemiAxesRow& row, double q) { return noether_n(row_moments(row, q)); }
std::pair<double, double> h_z_n(const SemiAxesRow& row, double q, double F) {
  return h_z_n(row_moments(row, q), F);
}

SemiAxesRow reduce_pair(const SemiAxesRow& sigma, const SemiAxesRow& tau) {
  if (sigma.size() != tau.size()) {
    throw DimensionError("reduce_pair: rows have lengths " + std::to_string(sigma.size()) +
                         " and " + std::to_string(tau.size()));
  }
  std::vector<double> logs(sigma.size());
  const auto s = sigma.log_sigma();
  const auto t = tau.log_sigma();
  for (std::size_t i = 0; i < logs.size(); ++i) logs[i] = t[i] - s[i];
  return SemiAxesRow::from_log(std::move(logs));
}

// --- limits ----------------------------------------------------------------

FamilyLimits family_limits(const SpectrumFamily& family, const Exponent& p, double q) {
  require_positive_q(q);
  return std::visit(
      [&](const auto& f) -> FamilyLimits {
        using T = std::decay_t<decltype(f)>;
        FamilyLimits lim;
        if constexpr (std::is_same_v<T, ConstantAxes>) {
          lim.F = 1.0;
          lim.G = 1.0;
          lim.z = 0.0;
          lim.threshold_ok = true;
          lim.clt_ok = !same_exponent(p, q);
        } else if constexpr (std::is_same_v<T, EventuallyPeriodicAxes>) {
          // Only the repeating block matters in the limit.
          if (all_equal(f.period)) {
            lim.F = 1.0;
            lim.G = 1.0;
          } else {
            const auto m = row_moments(SemiAxesRow::from_axes(f.period), q);
            lim.F = std::max(1.0, f_n(m));
            lim.G = std::min(1.0, g_n(m));
          }
          lim.z = 0.0;
          lim.threshold_ok = true;
          lim.clt_ok = !same_exponent(p, q) || *lim.G < 1.0;
        } else if constexpr (std::is_same_v<T, PowerLogAxes>) {
          const double aq = f.alpha * q;
          const bool at_threshold = near(aq, 1.0);
          lim.threshold_ok = (aq < 1.0 && !at_threshold) || (at_threshold && f.beta < 0.0);
          if (aq < 1.0 && !at_threshold) {
            lim.F = 1.0 / (std::exp(f.alpha) * std::pow(1.0 - aq, 1.0 / q));
          } else {
            lim.F = kInf;
          }
          const bool at_clt_edge = near(2.0 * aq, 1.0);
          const bool clt_premises =
              (2.0 * aq < 1.0 && !at_clt_edge) || (at_clt_edge && f.beta <= 1.0 / (2.0 * q));
          if (clt_premises) {
            lim.G = f.alpha == 0.0 ? 1.0
                                   : std::sqrt(std::max(0.0, 1.0 - 2.0 * aq)) / (1.0 - aq);
            const double ab = f.alpha * f.beta;
            if (f.beta == 0.0) {
              lim.z = 0.0;
            } else if (ab < 0.0) {
              lim.z = -kInf;
            } else {
              lim.z = kInf;  // αβ > 0, or α = 0 with β ≠ 0
            }
            lim.clt_ok = !same_exponent(p, q) || *lim.G < 1.0;
          }
        } else {
          throw UnsupportedFamily("no closed-form limits for explicit family '" + f.description +
                                  "'");
        }
        return lim;
      },
      family.kind());
}

double s_squared(const Exponent& p, double q, double G) {
  require_positive_q(q);
  const double m = moment(p, q);
  const double v = central_variance(p, q);
  const double head = v / (q * q * m * m);
  if (p.is_infinite()) return head;
  const double pv = p.value();
  const double g2 = G * G;
  const double s2 = head - 2.0 * covariance(p, pv, q) * g2 / (pv * q * m) + g2 / pv;
  return std::max(0.0, s2);
}

double t_critical(const Exponent& p, double q, double F) {
  if (F == kInf) return kInf;
  return F / threshold_constant(p, q);
}

std::optional<double> predict_limit(const Exponent& p, double q, double t,
                                    const FamilyLimits& limits) {
  if (!limits.threshold_ok || !(t >= 0.0)) return std::nullopt;
  if (limits.F == kInf) return t == kInf ? std::nullopt : std::optional<double>(0.0);
  const double ta = t * threshold_constant(p, q);
  if (std::abs(ta - limits.F) > kCriticalRelTol * limits.F) {
    return ta < limits.F ? 0.0 : 1.0;
  }
  if (!limits.clt_ok || !limits.z) return std::nullopt;
  const double z = *limits.z;
  if (z == kInf) return 0.0;
  if (z == -kInf) return 1.0;
  const double s = std::sqrt(s_squared(p, q, limits.G.value_or(1.0)));
  if (!(s > 0.0)) return std::nullopt;
  return normal_cdf(-z / s);
}

}  // namespace ellvol
