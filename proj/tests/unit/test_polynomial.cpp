#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "vbsbl/polynomial.hpp"

using namespace vbsbl;

TEST_CASE("coefficient arithmetic") {
  const Poly a{1, 1};
  const Poly b{1, 2};
  CHECK(poly_mul(a, b) == Poly{1, 3, 2});
  CHECK(poly_axpy(a, 2.0, Poly{0, 0, 1}) == Poly{1, 1, 2});
  CHECK(poly_shift(a, 2) == Poly{0, 0, 1, 1});
  CHECK(poly_eval(Poly{2, -3, 1}, 3.0) == 2.0);
  Poly t{1, 2, 0, 0};
  poly_trim(t);
  CHECK(t == Poly{1, 2});
}

TEST_CASE("positive real roots of small polynomials") {
  const auto one = positive_real_roots(Poly{1, -1});
  REQUIRE(one.size() == 1);
  CHECK(one[0] == doctest::Approx(1.0).epsilon(1e-14));

  CHECK(positive_real_roots(Poly{1, 0, 1}).empty());

  const auto two = positive_real_roots(Poly{2, -3, 1});
  REQUIRE(two.size() == 2);
  CHECK(two[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(two[1] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("negative and zero roots are dropped") {
  // (x + 1)(x - 3) x
  const auto r = positive_real_roots(oracle::poly_product({{1, 1}, {-3, 1}, {0, 1}}));
  REQUIRE(r.size() == 1);
  CHECK(r[0] == doctest::Approx(3.0));
}

TEST_CASE("double root is merged") {
  const auto r = positive_real_roots(oracle::poly_product({{-2, 1}, {-2, 1}, {1, 1}}));
  REQUIRE(r.size() == 1);
  CHECK(r[0] == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("roots spread over many decades are recovered") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> roots;
    std::vector<std::vector<double>> factors;
    const Index n = oracle::uniform_int(rng, 1, 9);
    for (Index k = 0; k < n; ++k) {
      roots.push_back(oracle::log_uniform(rng, 1e-4, 1e4));
      factors.push_back({-roots.back(), 1.0});
    }
    std::sort(roots.begin(), roots.end());
    bool separated = true;
    for (std::size_t k = 1; k < roots.size(); ++k) separated &= roots[k] > 1.2 * roots[k - 1];
    if (!separated) continue;
    const auto found = positive_real_roots(oracle::poly_product(factors));
    REQUIRE(found.size() == roots.size());
    for (std::size_t k = 0; k < roots.size(); ++k) CHECK(found[k] == doctest::Approx(roots[k]).epsilon(1e-8));
  }
}

TEST_CASE("all-zero polynomial is degenerate") {
  CHECK_THROWS_AS(positive_real_roots(Poly{0, 0, 0}), Error);
  CHECK(positive_real_roots(Poly{3}).empty());
}
