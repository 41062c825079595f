#include <doctest.h>

#include <cmath>

#include "vbsbl/hyperprior.hpp"

using namespace vbsbl;

TEST_CASE("column-3 updates of the special cases") {
  // rho = 1, d = 1, <x^H B x> = 5
  CHECK(gamma_update(Jeffreys{}, 5.0, 1, 1.0) == doctest::Approx(0.2));
  CHECK(gamma_update(ScaledJeffreys{1.0}, 5.0, 1, 1.0) == doctest::Approx(2.0 / 5.0));
  CHECK(gamma_update(GammaPrior{2.0, 1.0}, 5.0, 1, 1.0) == doctest::Approx(1.0 / 3.0));
  CHECK(gamma_update(InverseGamma{10.0}, 5.0, 1, 1.0) == doctest::Approx(1.0));
  CHECK(gamma_update(Jeffreys{}, 2.0, 4, 0.5) == doctest::Approx(2.0));
}

TEST_CASE("GIG mean at half-integer orders") {
  const double a = 2.0, b = 3.0;
  const double z = std::sqrt(a * b);
  CHECK(gig_mean(a, b, -0.5) == doctest::Approx(std::sqrt(b / a)).epsilon(1e-12));
  CHECK(gig_mean(a, b, 0.5) == doctest::Approx(std::sqrt(b / a) * (1.0 + 1.0 / z)).epsilon(1e-12));
}

TEST_CASE("GIG mean switches to the asymptotic form for large arguments") {
  const double a = 1.0, b = 1e6, c = 0.5;
  const double z = std::sqrt(a * b);
  CHECK(gig_mean(a, b, c) == doctest::Approx(std::sqrt(b / a) * (1.0 + 1.0 / z)).epsilon(1e-9));
  CHECK(std::isfinite(gig_mean(1e-3, 1e9, 3.0)));
}

TEST_CASE("GIG update approaches the inverse-gamma row as a vanishes") {
  // GIG(a, b, c) with c = -rho d... the update uses c_hat = c + rho d. With the
  // prior's a -> 0 and c -> 0 the posterior mean tends to the gamma_update of
  // the matching member; compare against the closed form of the GIG mean
  // with a_hat = 2 rho E and c_hat = rho d.
  const double E = 3.0, rho = 1.0;
  const Index d = 2;
  const double g = gamma_update(GeneralizedInverseGaussian{1e-12, 4.0, 0.0}, E, d, rho);
  const double a_hat = 2.0 * rho * E;
  const double zz = std::sqrt(a_hat * 4.0);
  const double expected = std::sqrt(4.0 / a_hat) * std::cyl_bessel_k(3.0, zz) / std::cyl_bessel_k(2.0, zz);
  CHECK(g == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("large-b GIG mean tracks the inverse-gamma closed form") {
  // With a_hat = 2 rho E and c_hat = 0 the GIG mean tends to sqrt(b / a_hat)
  // as sqrt(a_hat b) grows, which is the inverse-gamma update.
  const double E = 2.0, rho = 0.5;
  const double a_hat = 2.0 * rho * E;
  for (double b : {1e4, 1e6, 1e8}) {
    const double gig = gig_mean(a_hat, b, 0.0);
    const double ig = gamma_update(InverseGamma{b}, E, 1, rho);
    CHECK(std::abs(gig / ig - 1.0) <= 1.0 / std::sqrt(a_hat * b));
  }
}

TEST_CASE("prior names round trip") {
  for (const char* name : {"jeffreys", "scaled-jeffreys", "gamma", "inverse-gamma", "gig"}) {
    CHECK(prior_name(make_prior(name)) == name);
  }
  CHECK(std::get<ScaledJeffreys>(make_prior("scaled-jeffreys", {}, {}, 2.5)).c == 2.5);
  CHECK_THROWS_AS(make_prior("laplace"), Error);
  CHECK(has_fast_update(Jeffreys{}));
  CHECK_FALSE(has_fast_update(GeneralizedInverseGaussian{}));
}

TEST_CASE("prior validation") {
  CHECK_NOTHROW(validate_prior(ScaledJeffreys{-0.5}, 2, 0.5));
  CHECK_THROWS_AS(validate_prior(ScaledJeffreys{-1.0}, 2, 0.5), Error);
  CHECK_THROWS_AS(validate_prior(GammaPrior{-1.0, 1.0}, 2, 0.5), Error);
  CHECK_THROWS_AS(validate_prior(InverseGamma{0.0}, 2, 0.5), Error);
  CHECK_THROWS_AS(validate_noise_prior(NoisePrior{-1.0, 0.0}), Error);
}

TEST_CASE("per-block prior assignment") {
  const PriorAssignment shared(Jeffreys{});
  CHECK(shared.shared());
  CHECK(std::holds_alternative<Jeffreys>(shared.for_block(5)));
  const PriorAssignment per(std::vector<Hyperprior>{Jeffreys{}, ScaledJeffreys{1.0}});
  CHECK(std::holds_alternative<ScaledJeffreys>(per.for_block(1)));
  CHECK_THROWS(per.for_block(2));
}
