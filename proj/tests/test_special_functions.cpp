#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ellvol/special_functions.hpp"
#include "oracle.hpp"

using namespace ellvol;

namespace {
const Exponent kInfP = Exponent::infinity();
Exponent P(double p) { return Exponent::finite(p); }
}  // namespace

TEST_CASE("Exponent parsing and validation") {
  CHECK(Exponent::parse("inf").is_infinite());
  CHECK(Exponent::parse("Infinity").is_infinite());
  CHECK(Exponent::parse("+inf").is_infinite());
  CHECK(Exponent::parse("2.5").value() == 2.5);
  CHECK(Exponent::parse("inf").reciprocal() == 0.0);
  CHECK_THROWS_AS((void)Exponent::parse("0"), DomainError);
  CHECK_THROWS_AS((void)Exponent::parse("-1"), DomainError);
  CHECK_THROWS_AS((void)Exponent::parse("2x"), DomainError);
  CHECK_THROWS_AS((void)Exponent::parse(""), DomainError);
  CHECK_THROWS_AS((void)Exponent::finite(kInf), DomainError);
  CHECK(same_exponent(P(2), 2.0));
  CHECK_FALSE(same_exponent(kInfP, kInf));
}

TEST_CASE("log_gamma against 50-digit references") {
  CHECK(std::abs(log_gamma(1.0)) <= 1e-13);
  CHECK(std::abs(log_gamma(2.0)) <= 1e-13);
  CHECK(std::abs(log_gamma(5.0) - std::log(24.0)) <= 1e-13);

  struct Ref {
    double x, value;
  };
  // mpmath.loggamma at 50 digits
  const Ref small[] = {
      {0.5, 0.5723649429247000870717137},
      {1.5, -0.1207822376352452223455184},
      {3.0, 0.6931471805599453094172321},
  };
  for (const auto& r : small) {
    CAPTURE(r.x);
    CHECK(std::abs(log_gamma(r.x) - r.value) <= 1e-13);
  }
  const Ref large[] = {
      {0.001, 6.907178885383853682512345},  {7.25, 7.052185450738539444925749},
      {10.0, 12.80182748008146961120772},   {100.0, 359.134205369575398776044},
      {1000.0, 5905.220423209181211826077}, {12345.678, 103959.9199055460609210806},
      {1e6, 12815504.56914761165997697},
  };
  for (const auto& r : large) {
    CAPTURE(r.x);
    CHECK(std::abs(log_gamma(r.x) / r.value - 1.0) <= 1e-14);
  }
  CHECK_THROWS_AS((void)log_gamma(0.0), DomainError);
  CHECK_THROWS_AS((void)log_gamma(-1.0), DomainError);
}

TEST_CASE("log_gamma satisfies the recurrence") {
  for (double x = 0.05; x < 60.0; x *= 1.37) {
    CAPTURE(x);
    CHECK(std::abs(log_gamma(x + 1.0) - log_gamma(x) - std::log(x)) <= 2e-13 * (1 + std::abs(log_gamma(x))));
  }
}

TEST_CASE("moments: closed values") {
  CHECK(moment(P(2), 4) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(moment(kInfP, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(moment(kInfP, kInf) == 0.0);
  CHECK(moment(P(3), 0) == 1.0);
  CHECK(central_variance(P(3), 0) == 0.0);
  CHECK(central_variance(kInfP, 1) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(central_variance(kInfP, kInf) == 0.0);
  CHECK(covariance(kInfP, kInf, 3) == 0.0);
  CHECK(covariance(P(2), 2, 2) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(covariance(P(2), 2, 1) == doctest::Approx(0.79788456080286536).epsilon(1e-13));
  CHECK_THROWS_AS((void)moment(P(2), kInf), DomainError);
  CHECK_THROWS_AS((void)moment(P(2), -1), DomainError);
}

TEST_CASE("moment(p,p) = 1 and V_p(p) = p") {
  for (double p : {0.5, 1.0, 2.0, 3.0, 7.5}) {
    CAPTURE(p);
    CHECK(std::abs(moment(P(p), p) - 1.0) <= 1e-10);
    CHECK(std::abs(central_variance(P(p), p) - p) <= 1e-10);
  }
}

TEST_CASE("covariance(q,q) equals central_variance") {
  for (double p : {0.5, 1.0, 2.0, 7.5}) {
    for (double q : {0.3, 1.0, 2.5}) {
      CHECK(covariance(P(p), q, q) == central_variance(P(p), q));
    }
  }
  CHECK(covariance(kInfP, 2, 2) == central_variance(kInfP, 2));
}

TEST_CASE("Cauchy-Schwarz for covariance") {
  for (double p : {0.5, 1.0, 2.0, 3.0, 7.5}) {
    for (double q : {0.25, 1.0, 2.0, 4.0}) {
      for (double r : {0.5, 1.5, 3.0}) {
        const double c = covariance(P(p), q, r);
        CHECK(c * c <= central_variance(P(p), q) * central_variance(P(p), r) * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("moments agree with quadrature of the density") {
  for (double p : {0.5, 1.0, 1.5, 2.0, 3.0, 7.5}) {
    for (double q : {0.5, 1.0, 2.0, 3.7}) {
      CAPTURE(p);
      CAPTURE(q);
      const double ref = oracle::moment_by_quadrature(p, q);
      CHECK(std::abs(moment(P(p), q) / ref - 1.0) <= 1e-8);
      const double cref = oracle::covariance_by_quadrature(p, q, 1.0);
      CHECK(std::abs(covariance(P(p), q, 1.0) - cref) <= 1e-8 * std::abs(cref));
    }
  }
  for (double q : {0.5, 2.0, 5.0}) {
    CHECK(std::abs(moment(kInfP, q) / oracle::moment_by_quadrature(kInf, q) - 1.0) <= 1e-8);
  }
}

TEST_CASE("ball volumes and normalized radii") {
  CHECK(log_ball_volume(2, P(2)) == doctest::Approx(std::log(std::numbers::pi)).epsilon(1e-14));
  for (double p : {0.5, 1.0, 2.0, 9.0}) CHECK(log_ball_volume(1, P(p)) == doctest::Approx(std::log(2.0)));
  CHECK(log_ball_volume(1, kInfP) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(log_ball_volume(3, kInfP) == doctest::Approx(std::log(8.0)).epsilon(1e-15));
  CHECK(normalized_radius_log(1, P(2)) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(normalized_radius_log(2, P(2)) ==
        doctest::Approx(-std::log(std::numbers::pi) / 2).epsilon(1e-14));
  CHECK(normalized_radius_log(3, kInfP) == doctest::Approx(-std::log(2.0)).epsilon(1e-14));
  for (long long n = 1; n <= 100; ++n) {
    const double ref = 0.5 * n * std::log(std::numbers::pi) - log_gamma(0.5 * n + 1.0);
    CHECK(std::abs(log_ball_volume(n, P(2)) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
  }
  CHECK(std::isfinite(log_ball_volume(10'000'000, P(0.5))));
  CHECK_THROWS_AS((void)log_ball_volume(0, P(2)), DomainError);
}

TEST_CASE("threshold constant") {
  for (double p : {0.5, 1.0, 2.0, 3.0, 7.5, 40.0}) {
    CHECK(std::abs(threshold_constant(P(p), p) - 1.0) <= 1e-12);
  }
  // mpmath at 50 digits
  CHECK(threshold_constant(kInfP, 1) == doctest::Approx(0.73575888234288464).epsilon(1e-13));
  CHECK(threshold_constant(P(2), 1) == doctest::Approx(0.95273613236508996845).epsilon(1e-13));
  CHECK(threshold_constant(P(1), 2) == doctest::Approx(0.930191367102632859).epsilon(1e-13));
  CHECK(threshold_constant(P(3), 1.5) == doctest::Approx(0.962389969150483152).epsilon(1e-13));
  CHECK(threshold_constant(kInfP, 2) == doctest::Approx(0.838211177622817154).epsilon(1e-13));
  CHECK_THROWS_AS((void)threshold_constant(P(2), kInf), DomainError);
}

TEST_CASE("threshold constant matches its defining limit") {
  // M_p(q)^{-1/q} (n^{-1/q} r_{n,q}) / (n^{-1/p} r_{n,p}) at n = 1e6
  const long long n = 1'000'000;
  const double ln_n = std::log(static_cast<double>(n));
  for (auto [p, q] : {std::pair{2.0, 1.0}, {1.0, 2.0}, {3.0, 1.5}}) {
    const double lim = std::exp(-std::log(moment(P(p), q)) / q - ln_n / q +
                                normalized_radius_log(n, P(q)) + ln_n / p -
                                normalized_radius_log(n, P(p)));
    CHECK(std::abs(lim / threshold_constant(P(p), q) - 1.0) <= 1e-5);
  }
}

TEST_CASE("normal_cdf") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(kInf) == 1.0);
  CHECK(normal_cdf(-kInf) == 0.0);
  CHECK(normal_cdf(1.959963985) == doctest::Approx(0.97500000002688).epsilon(1e-12));
  CHECK(normal_cdf(-10.0) == doctest::Approx(7.61985302416052606e-24).epsilon(1e-12));
  for (double x = -8.0; x <= 8.0; x += 0.37) {
    CHECK(std::abs(normal_cdf(x) + normal_cdf(-x) - 1.0) <= 1e-12);
  }
}

TEST_CASE("moment_set bundles consistent values") {
  const auto ms = moment_set(P(2), 1.0);
  CHECK(ms.m == moment(P(2), 1.0));
  CHECK(ms.v == central_variance(P(2), 1.0));
  CHECK(ms.c_pq == covariance(P(2), 2.0, 1.0));
  const auto mi = moment_set(kInfP, 2.0);
  CHECK(mi.c_pq == 0.0);
}
