#include <doctest.h>

#include <cmath>
#include <random>

#include "blowup/anisotropy.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace blowup;

namespace {
std::vector<double> entries_of(const AnisotropyMatrix& m) {
  return {m.entries().begin(), m.entries().end()};
}
}  // namespace

TEST_SUITE("anisotropy") {

TEST_CASE("normalize sorts descending and validates") {
  CHECK(entries_of(AnisotropyMatrix::normalize({2.0, 5.0}, 3)) == std::vector<double>{5.0, 2.0});
  CHECK(entries_of(AnisotropyMatrix::normalize({1.0, 1.0, 1.0}, 4)) == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(error_kind([] { AnisotropyMatrix::normalize({3.0, 0.0, 1.0}, 4); }) == ErrorKind::NonPositiveEntry);
  CHECK(error_kind([] { AnisotropyMatrix::normalize({1.0, 2.0}, 4); }) == ErrorKind::DimensionMismatch);
  CHECK(error_kind([] { AnisotropyMatrix::normalize({1.0}, 2); }) == ErrorKind::UnsupportedDimension);
  CHECK(error_kind([] { AnisotropyMatrix::normalize({1.0, -2.0}, 3); }) == ErrorKind::NonPositiveEntry);
}

TEST_CASE("alpha of lambda") {
  CHECK(alpha_of_lambda(1.0, 3) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-15));
  CHECK(alpha_of_lambda(1.0, 3) - 1.0 == doctest::Approx(std::sqrt(2.0) - 2.0).epsilon(1e-15));
  CHECK(alpha_of_lambda(0.0, 3) == 0.0);
  CHECK(alpha_of_lambda(2.0, 4) == doctest::Approx((std::sqrt(17.0) - 3.0) / 2.0).epsilon(1e-15));
  CHECK(alpha_of_lambda(2.0, 4) == doctest::Approx(oracle::alpha_bisection(2.0, 4)).epsilon(1e-14));
  CHECK(error_kind([] { alpha_of_lambda(-1e-3, 3); }) == ErrorKind::NegativeLambda);
}

TEST_CASE("alpha keeps relative accuracy for tiny lambda") {
  // alpha ~ lambda / (n - 1) as lambda -> 0; the naive formula loses every digit here.
  const double lam = 1e-14;
  CHECK(alpha_of_lambda(lam, 3) == doctest::Approx(oracle::alpha_bisection(lam, 3)).epsilon(1e-12));
  CHECK(alpha_of_lambda(lam, 3) == doctest::Approx(lam / 2.0).epsilon(1e-12));
}

TEST_CASE("alpha residual, monotonicity and alpha(n - 2) < 1") {
  for (int n = 3; n <= 8; ++n) {
    double prev = -1.0;
    for (int k = 0; k < 1000; ++k) {
      const double lam = 0.01 * k;
      const double a = alpha_of_lambda(lam, n);
      CHECK(std::abs(a * a + (n - 1) * a - lam) < 1e-12 * std::max(1.0, lam));
      CHECK(a > prev);
      prev = a;
    }
    CHECK(alpha_of_lambda(n - 2, n) < 1.0);
    CHECK(alpha_of_lambda(n - 2, n) > 0.0);
  }
}

TEST_CASE("analytic bounds") {
  const auto iso = analytic_bounds(AnisotropyMatrix::normalize({1.0, 1.0}, 3));
  CHECK(iso.upper_n_minus_2 == 1.0);
  REQUIRE(iso.mu_upper_rational);
  CHECK(*iso.mu_upper_rational == 1.0);
  CHECK(analytic_bounds(AnisotropyMatrix::normalize({1.0, 1.0, 1.0}, 4)).upper_n_minus_2 == 2.0);
  CHECK_FALSE(analytic_bounds(AnisotropyMatrix::normalize({1.0, 1.0, 1.0}, 4)).mu_upper_rational);
  const auto b31 = analytic_bounds(AnisotropyMatrix::normalize({3.0, 1.0}, 3));
  CHECK(*b31.mu_upper_rational == doctest::Approx(0.6).epsilon(1e-15));
  REQUIRE(b31.sqrt_envelope);
  CHECK(b31.sqrt_envelope->first == doctest::Approx(-0.5));
  CHECK(b31.sqrt_envelope->second == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("weight stays between the extreme entries") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  const auto m = AnisotropyMatrix::normalize({4.0, 0.3, 2.5}, 4);
  for (int k = 0; k < 10000; ++k) {
    std::vector<double> xi{g(rng), g(rng), g(rng)};
    const double s = std::hypot(xi[0], xi[1], xi[2]);
    for (double& v : xi) v /= s;
    const double w = m.weight(xi);
    CHECK(w >= m.smallest() * (1 - 1e-14));
    CHECK(w <= m.largest() * (1 + 1e-14));
    std::vector<double> flipped{-xi[0], xi[1], -xi[2]};
    CHECK(m.weight(flipped) == doctest::Approx(w).epsilon(1e-15));
  }
  CHECK(error_kind([&] { m.weight(std::vector<double>{1.0, 0.0}); }) == ErrorKind::SizeMismatch);
}

TEST_CASE("exponent report fields") {
  const auto m = AnisotropyMatrix::normalize({1.0, 1.0}, 3);
  const auto r = make_exponent_report(m, 1.0, 2, {"test", 8, false});
  CHECK(r.alpha == doctest::Approx(std::sqrt(2.0) - 1.0));
  CHECK(r.blowup_exponent == doctest::Approx(r.alpha - 1.0));
  CHECK(r.epsilon_exponent == doctest::Approx((r.alpha - 1.0) / 2));
  CHECK(r.below_upper_bound);
  CHECK(std::abs(r.alpha * r.alpha + 2 * r.alpha - r.lambda1) < 1e-12);
  CHECK_FALSE(make_exponent_report(m, 1.1, 1, {"test", 8, false}).below_upper_bound);
}

}
