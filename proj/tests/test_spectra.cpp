#include <doctest.h>

#include <cmath>
#include <random>

#include "ellvol/spectra.hpp"

using namespace ellvol;

namespace {

const Exponent kInfP = Exponent::infinity();
Exponent P(double p) { return Exponent::finite(p); }

SemiAxesRow row_of(std::initializer_list<double> v) {
  std::vector<double> axes(v);
  return SemiAxesRow::from_axes(axes);
}

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

SemiAxesRow random_row(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(1, 60);
  std::normal_distribution<double> log_axis(0.0, 2.0);
  std::vector<double> logs(static_cast<std::size_t>(len(rng)));
  for (double& l : logs) l = log_axis(rng);
  return SemiAxesRow::from_log(std::move(logs));
}

}  // namespace

TEST_CASE("rows validate their input") {
  std::vector<double> bad{1.0, -2.0};
  CHECK_THROWS_AS((void)SemiAxesRow::from_axes(bad), DomainError);
  std::vector<double> nan{1.0, std::nan("")};
  CHECK_THROWS_AS((void)SemiAxesRow::from_axes(nan), DomainError);
  std::vector<double> none;
  CHECK_THROWS_AS((void)SemiAxesRow::from_axes(none), DimensionError);
  CHECK_THROWS_AS((void)SemiAxesRow::constant(0), DimensionError);
}

TEST_CASE("materialize") {
  auto axes = [](const SpectrumFamily& f, std::size_t n) { return materialize(f, n).axes(); };
  auto same = [](const std::vector<double>& a, std::vector<double> b) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-15));
  };
  same(axes(PowerLogAxes{0, 0}, 3), {1, 1, 1});
  same(axes(PowerLogAxes{1, 0}, 3), {1, 2, 3});
  same(axes(PowerLogAxes{0, 1}, 2), {std::log(2.0), std::log(3.0)});
  same(axes(EventuallyPeriodicAxes{{}, {1, 2}}, 3), {1, 2, 1});
  same(axes(EventuallyPeriodicAxes{{5}, {1, 2}}, 4), {5, 1, 2, 1});
  same(axes(ConstantAxes{3}, 2), {3, 3});
  CHECK_THROWS_AS((void)materialize(ConstantAxes{1}, 0), DimensionError);
  CHECK_THROWS((void)materialize(ConstantAxes{-1}, 2));
  CHECK_THROWS((void)materialize(EventuallyPeriodicAxes{{}, {}}, 2));

  const auto file = SpectrumFamily::from_row(row_of({4, 5, 6}), "file:x");
  same(axes(file, 2), {4, 5});
  CHECK_THROWS((void)materialize(file, 4));
}

TEST_CASE("row functionals: worked examples") {
  const auto r12 = row_of({1, 2});
  CHECK(f_n(r12, 1) == doctest::Approx(1.06066017177982129).epsilon(1e-14));
  CHECK(f_n(row_of({1, 4}), 2) == doctest::Approx(1.45773797371132512).epsilon(1e-14));
  CHECK(g_n(r12, 1) == doctest::Approx(0.948683298050513800).epsilon(1e-14));
  CHECK(flatness_n(r12, 1) == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(noether_n(r12, 1) == doctest::Approx(0.8).epsilon(1e-14));

  const auto c = SemiAxesRow::constant(7, 2.5);
  CHECK(f_n(c, 1.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g_n(c, 1.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(flatness_n(c, 1.5) == doctest::Approx(1.0 / 7).epsilon(1e-14));
  CHECK(noether_n(c, 1.5) == doctest::Approx(1.0 / 7).epsilon(1e-14));

  const auto one = row_of({3});
  CHECK(flatness_n(one, 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(noether_n(one, 2) == doctest::Approx(1.0).epsilon(1e-14));

  const auto [h, z] = h_z_n(SemiAxesRow::constant(10), 1.0, 1.0);
  CHECK(h == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(z) <= 1e-14);
}

TEST_CASE("row functionals survive extreme axes") {
  // σ^{-2q} spans e^{±1400}: only the log-domain path survives
  std::vector<double> logs{-350.0, 0.0, 300.0, 350.0};
  const auto r = SemiAxesRow::from_log(logs);
  CHECK(std::isfinite(f_n(r, 2)));
  CHECK(std::isfinite(g_n(r, 2)));
  CHECK(noether_n(r, 2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("property: f_n >= 1, g_n in [n^-1/2, 1], exact g_n identity, scale invariance") {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> qdist(0.2, 4.0);
  std::uniform_real_distribution<double> cdist(-30.0, 30.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto row = random_row(rng);
    const double q = qdist(rng);
    const auto n = static_cast<double>(row.size());
    CAPTURE(trial);
    const double f = f_n(row, q);
    const double g = g_n(row, q);
    CHECK(f >= 1.0 - 1e-12);
    CHECK(g <= 1.0 + 1e-12);
    CHECK(g >= 1.0 / std::sqrt(n) - 1e-12);
    CHECK(close(g, std::pow(f, q) / std::pow(f_n(row, 2 * q), q), 1e-12));

    const auto scaled = row.scaled(std::exp(cdist(rng)));
    CHECK(close(f_n(scaled, q), f, 1e-12));
    CHECK(close(g_n(scaled, q), g, 1e-12));
    CHECK(close(flatness_n(scaled, q), flatness_n(row, q), 1e-12));
    CHECK(close(noether_n(scaled, q), noether_n(row, q), 1e-12));
    const double noether = noether_n(row, q);
    CHECK(noether >= 1.0 / n - 1e-15);
    CHECK(noether <= 1.0 + 1e-15);
  }
}

TEST_CASE("f_n = 1 only for constant rows") {
  CHECK(std::abs(f_n(SemiAxesRow::constant(1000, 0.3), 2.0) - 1.0) <= 1e-12);
  CHECK(f_n(row_of({1, 1, 1, 1.0001}), 2.0) - 1.0 > 1e-12);
}

TEST_CASE("streamed and materialized moments agree") {
  for (const SpectrumFamily& fam :
       {SpectrumFamily(PowerLogAxes{0.3, -0.5}), SpectrumFamily(EventuallyPeriodicAxes{{9}, {1, 2, 3}}),
        SpectrumFamily(ConstantAxes{2})}) {
    const auto a = row_moments(fam, 5000, 1.3);
    const auto b = row_moments(materialize(fam, 5000), 1.3);
    CHECK(close(a.mean_log + 1.0, b.mean_log + 1.0, 1e-13));
    CHECK(close(a.log_sum_q, b.log_sum_q, 1e-13));
    CHECK(close(a.log_sum_2q, b.log_sum_2q, 1e-13));
    CHECK(close(a.log_max_2q + 1.0, b.log_max_2q + 1.0, 1e-13));
  }
}

TEST_CASE("reduce_pair") {
  const auto a = reduce_pair(row_of({1, 2}), row_of({2, 2})).axes();
  CHECK(a[0] == doctest::Approx(2.0));
  CHECK(a[1] == doctest::Approx(1.0));
  const auto b = reduce_pair(row_of({1, 1}), row_of({3, 4})).axes();
  CHECK(b[0] == doctest::Approx(3.0));
  CHECK(b[1] == doctest::Approx(4.0));
  for (double v : reduce_pair(row_of({1.5, 7, 0.2}), row_of({1.5, 7, 0.2})).axes()) {
    CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS((void)reduce_pair(row_of({1}), row_of({1, 2})), DimensionError);
}

TEST_CASE("family limits: closed forms") {
  const auto flat = family_limits(PowerLogAxes{0, 0}, P(2), 1);
  CHECK(flat.F == 1.0);
  CHECK(*flat.G == 1.0);
  CHECK(*flat.z == 0.0);
  CHECK(flat.threshold_ok);
  CHECK(flat.clt_ok);

  const auto pl = family_limits(PowerLogAxes{0.2, 0}, P(2), 1);
  CHECK(pl.F == doctest::Approx(1.02341344134747732).epsilon(1e-14));
  CHECK(*pl.G == doctest::Approx(0.968245836551854221).epsilon(1e-14));
  CHECK(*pl.z == 0.0);
  CHECK(pl.threshold_ok);
  CHECK(pl.clt_ok);

  const double q = 1.5;
  const auto edge = family_limits(PowerLogAxes{1 / q, -1}, P(2), q);
  CHECK(std::isinf(edge.F));
  CHECK(edge.threshold_ok);
  CHECK_FALSE(edge.clt_ok);

  const auto beyond = family_limits(PowerLogAxes{1 / q, 0.5}, P(2), q);
  CHECK_FALSE(beyond.threshold_ok);
  CHECK_FALSE(beyond.clt_ok);

  const auto half_edge = family_limits(PowerLogAxes{0.5, 0.5}, P(2), 1);
  CHECK(half_edge.clt_ok);
  CHECK(*half_edge.G == 0.0);
  CHECK_FALSE(family_limits(PowerLogAxes{0.5, 0.6}, P(2), 1).clt_ok);

  CHECK(*family_limits(PowerLogAxes{0.2, 1}, P(2), 1).z == kInf);
  CHECK(*family_limits(PowerLogAxes{0.2, -1}, P(2), 1).z == -kInf);
  CHECK(*family_limits(PowerLogAxes{-0.2, 1}, P(2), 1).z == -kInf);
  CHECK(*family_limits(PowerLogAxes{0, 1}, P(2), 1).z == kInf);
  CHECK(*family_limits(PowerLogAxes{0, -1}, P(2), 1).z == kInf);

  const auto ep = family_limits(EventuallyPeriodicAxes{{}, {1, 2}}, P(2), 1);
  CHECK(ep.F == doctest::Approx(1.06066017177982129).epsilon(1e-14));
  CHECK(*ep.G == doctest::Approx(0.948683298050513800).epsilon(1e-14));
  CHECK(*ep.z == 0.0);

  // p = q with G = 1 makes s = 0: the CLT premise fails
  CHECK_FALSE(family_limits(ConstantAxes{1}, P(2), 2).clt_ok);
  CHECK(family_limits(EventuallyPeriodicAxes{{}, {1, 2}}, P(2), 2).clt_ok);

  const auto file = SpectrumFamily::from_row(row_of({1, 2}), "file:x");
  CHECK_THROWS_AS((void)family_limits(file, P(2), 1), UnsupportedFamily);
}

TEST_CASE("s_squared") {
  CHECK(s_squared(P(2), 2, 1) == doctest::Approx(0.0).epsilon(1e-12).scale(1));
  CHECK(std::abs(s_squared(P(3.5), 3.5, 1)) <= 1e-12);
  CHECK(s_squared(P(2), 1, 1) == doctest::Approx(0.0707963267948966192).epsilon(1e-13));
  for (double G : {0.0, 0.4, 1.0}) CHECK(s_squared(kInfP, 1, G) == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("property: the two forms of s^2 agree") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pd(0.5, 8.0), qd(0.3, 6.0), gd(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double p = pd(rng), q = qd(rng), G = gd(rng);
    const Exponent e = P(p);
    const double m = moment(e, q);
    // Var[|X|^q/(qM) - G²|X|^p/p] + G²(1-G²)/p
    const double alt = central_variance(e, q) / (q * q * m * m) -
                       2 * G * G * covariance(e, q, p) / (p * q * m) +
                       std::pow(G, 4) * central_variance(e, p) / (p * p) + G * G * (1 - G * G) / p;
    CAPTURE(p);
    CAPTURE(q);
    CAPTURE(G);
    CHECK(std::abs(s_squared(e, q, G) - alt) <= 1e-12 * std::max(1.0, std::abs(alt)));
  }
}

TEST_CASE("t_critical and predict_limit") {
  CHECK(t_critical(P(2), 1, 1) == doctest::Approx(1.04960856005070504).epsilon(1e-13));
  CHECK(t_critical(P(3), 3, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isinf(t_critical(P(2), 1, kInf)));

  const auto lim = family_limits(ConstantAxes{1}, P(2), 1);
  const double tc = t_critical(P(2), 1, lim.F);
  CHECK(*predict_limit(P(2), 1, 0.5 * tc, lim) == 0.0);
  CHECK(*predict_limit(P(2), 1, 2 * tc, lim) == 1.0);
  CHECK(*predict_limit(P(2), 1, tc, lim) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(*predict_limit(P(2), 1, tc * (1 + 1e-11), lim) == doctest::Approx(0.5));
  CHECK(*predict_limit(P(2), 1, 0.0, lim) == 0.0);

  const auto up = family_limits(PowerLogAxes{0.2, 1}, P(2), 1);
  CHECK(*predict_limit(P(2), 1, t_critical(P(2), 1, up.F), up) == 0.0);
  const auto down = family_limits(PowerLogAxes{0.2, -1}, P(2), 1);
  CHECK(*predict_limit(P(2), 1, t_critical(P(2), 1, down.F), down) == 1.0);

  const auto edge = family_limits(PowerLogAxes{1, -1}, P(2), 1);
  CHECK(*predict_limit(P(2), 1, 1e9, edge) == 0.0);

  FamilyLimits unknown_z = lim;
  unknown_z.z.reset();
  CHECK_FALSE(predict_limit(P(2), 1, tc, unknown_z).has_value());
  CHECK(predict_limit(P(2), 1, 2 * tc, unknown_z).has_value());
}

TEST_CASE("z_n behaviour for solvable families") {
  {
    const SpectrumFamily fam(EventuallyPeriodicAxes{{}, {1, 2}});
    const double F = family_limits(fam, P(2), 1).F;
    double prev = kInf;
    for (std::size_t n : {1001, 10001, 100001}) {
      const double z = std::abs(h_z_n(row_moments(fam, n, 1), F).second);
      CHECK(z < prev);
      prev = z;
    }
    CHECK(prev < 1e-2);
  }
  {
    const SpectrumFamily fam(PowerLogAxes{0, 1});
    const double F = family_limits(fam, P(2), 1).F;
    double prev = 0.0;
    for (std::size_t n : {1000, 10000, 100000}) {
      const double z = h_z_n(row_moments(fam, n, 1), F).second;
      CHECK(z > 0.0);
      CHECK(z > prev);
      prev = z;
    }
  }
}

TEST_CASE("convergence trends along n") {
  struct Case {
    double alpha, beta, q;
  };
  for (const Case c : {Case{0.2, 0, 1}, Case{0.3, 1, 2}, Case{-0.5, 2, 1}, Case{0.1, 1, 2}, Case{-0.3, -1, 1}}) {
    const SpectrumFamily fam(PowerLogAxes{c.alpha, c.beta});
    const auto lim = family_limits(fam, P(2), c.q);
    REQUIRE(lim.threshold_ok);
    CAPTURE(c.alpha);
    CAPTURE(c.beta);
    const double e3 = std::abs(f_n(row_moments(fam, 1000, c.q)) - lim.F);
    const double e6 = std::abs(f_n(row_moments(fam, 1'000'000, c.q)) - lim.F);
    CHECK(e6 < e3);
  }
  for (const Case c : {Case{0.2, 0, 1}, Case{1.0, -1, 1}, Case{0.5, -2, 2}, Case{-1, 0, 1}}) {
    const SpectrumFamily fam(PowerLogAxes{c.alpha, c.beta});
    REQUIRE(family_limits(fam, P(2), c.q).threshold_ok);
    CAPTURE(c.alpha);
    double prev = kInf;
    for (std::size_t n : {100, 1000, 10000}) {
      const double fl = flatness_n(row_moments(fam, n, c.q));
      CHECK(fl < prev);
      prev = fl;
    }
  }
}
