#include "ellvol/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace ellvol {

namespace {

constexpr double kZ95 = 1.959963984540054;

void validate(const McConfig& config) {
  if (config.samples == 0) throw std::invalid_argument("sample count must be >= 1");
  if (config.workers == 0) throw std::invalid_argument("worker count must be >= 1");
}

// Runs body(worker, j, stream_j) for every sample j on `workers` threads, each
// owning a contiguous block of sample indices.
template <typename Body>
void for_each_sample(const McConfig& config, Body&& body) {
  const RandomStream root(config.seed);
  const std::uint64_t total = config.samples;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(config.workers, total));
  auto run_block = [&](unsigned w) {
    const std::uint64_t begin = total * w / workers;
    const std::uint64_t end = total * (w + 1) / workers;
    for (std::uint64_t j = begin; j < end; ++j) {
      RandomStream stream = root.derive(j);
      body(w, j, stream);
    }
  };
  if (workers == 1) {
    run_block(0);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        run_block(w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ln r_{n,q} - ln r_{n,p} - mean ln σ: the membership threshold at t = 1.
double log_tstar_offset(const Exponent& p, double q, const SemiAxesRow& row) {
  return membership_log_threshold(p, q, row, 1.0);
}

}  // namespace

Interval wilson_interval(std::uint64_t hits, std::uint64_t samples) {
  if (samples == 0) throw std::invalid_argument("wilson interval needs samples >= 1");
  const auto n = static_cast<double>(samples);
  const double phat = static_cast<double>(hits) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double centre = (phat + z2 / (2.0 * n)) / denom;
  const double half = kZ95 / denom * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  return {std::clamp(centre - half, 0.0, phat), std::clamp(centre + half, phat, 1.0)};
}

std::vector<double> sample_log_scaled_norms(const Exponent& p, double q, const SemiAxesRow& row,
                                            const McConfig& config) {
  validate(config);
  const ScaledNormKernel kernel(row, q);
  std::vector<double> out(config.samples);
  std::vector<std::vector<double>> scratch(config.workers, std::vector<double>(row.size()));
  for_each_sample(config, [&](unsigned w, std::uint64_t j, RandomStream& stream) {
    auto& z = scratch[w];
    sample_uniform_ball(p, stream, z);
    out[j] = kernel.log_norm(z);
  });
  return out;
}

VolumeEstimate estimate_volume(const Exponent& p, double q, const SemiAxesRow& row, double t,
                               const McConfig& config) {
  validate(config);
  if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
  VolumeEstimate est;
  est.samples = config.samples;
  est.seed = config.seed;
  est.n = row.size();
  est.p = p;
  est.q = q;
  est.t = t;
  est.workers = config.workers;
  if (t > 0.0) {
    const double offset = log_tstar_offset(p, q, row);
    const double log_t = std::log(t);
    for (double log_norm : sample_log_scaled_norms(p, q, row, config)) {
      if (log_norm - offset <= log_t) ++est.hits;
    }
  }
  const auto n = static_cast<double>(est.samples);
  est.estimate = static_cast<double>(est.hits) / n;
  est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / n);
  const auto ci = wilson_interval(est.hits, est.samples);
  est.ci95_lo = ci.lo;
  est.ci95_hi = ci.hi;
  return est;
}

ScanTable threshold_scan(const Exponent& p, double q, const SpectrumFamily& family, std::size_t n,
                         std::span<const double> t_grid, const McConfig& config) {
  validate(config);
  if (t_grid.empty()) throw std::invalid_argument("t grid must be nonempty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
      throw std::invalid_argument("t grid must be positive and strictly increasing");
    }
  }
  const SemiAxesRow row = materialize(family, n);
  ScanTable table;
  if (!family.is_explicit()) {
    table.limits = family_limits(family, p, q);
    if (table.limits->threshold_ok) table.t_crit = t_critical(p, q, table.limits->F);
  }

  const double offset = log_tstar_offset(p, q, row);
  std::vector<double> log_tstar = sample_log_scaled_norms(p, q, row, config);
  for (double& v : log_tstar) v -= offset;
  std::sort(log_tstar.begin(), log_tstar.end());

  const auto total = static_cast<double>(config.samples);
  for (double t : t_grid) {
    ScanRow r;
    r.t = t;
    const auto hits = std::upper_bound(log_tstar.begin(), log_tstar.end(), std::log(t)) -
                      log_tstar.begin();
    r.estimate = static_cast<double>(hits) / total;
    r.std_error = std::sqrt(r.estimate * (1.0 - r.estimate) / total);
    if (table.limits) r.predicted = predict_limit(p, q, t, *table.limits);
    table.rows.push_back(r);
  }
  return table;
}

CltSample clt_statistic_samples(const Exponent& p, double q, const SemiAxesRow& row,
                                const McConfig& config, std::optional<double> limit_G) {
  validate(config);
  if (config.samples < 2) throw std::invalid_argument("CLT sampling needs at least 2 samples");
  const RowMoments m = row_moments(row, q);
  const double log_n = std::log(static_cast<double>(row.size()));
  const double prefactor = std::exp(m.log_sum_q - 0.5 * m.log_sum_2q);  // √n·g_n
  const double centre =
      log_n * p.reciprocal() - std::log(moment(p, q)) / q - m.log_sum_q / q;

  CltSample out;
  out.values = sample_log_scaled_norms(p, q, row, config);
  for (double& v : out.values) v = prefactor * std::expm1(v + centre);
  out.g_n = g_n(m);
  out.s2_theory = s_squared(p, q, out.g_n);
  if (limit_G) out.s2_limit = s_squared(p, q, *limit_G);
  if (out.s2_theory > 0.0) out.ks = ks_distance(out.values, 0.0, std::sqrt(out.s2_theory));
  return out;
}

double ks_distance(std::span<const double> values, double mean, double std) {
  if (values.empty()) throw std::invalid_argument("KS distance needs at least one value");
  if (!(std > 0.0)) throw std::invalid_argument("KS distance needs std > 0");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = normal_cdf((sorted[i] - mean) / std);
    const double above = static_cast<double>(i + 1) / n - cdf;
    const double below = cdf - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return d;
}

double ks_critical_value(double alpha, std::size_t n) {
  if (!(alpha > 0.0 && alpha < 1.0) || n == 0) {
    throw std::invalid_argument("KS critical value needs alpha in (0,1) and n >= 1");
  }
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

}  // namespace ellvol
