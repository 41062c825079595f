#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "vbsbl/core.hpp"

namespace vbsbl {

// Members of the generalized inverse Gaussian family on the block precisions.
// The limits a -> 0, b -> 0 are represented by dedicated types rather than by
// zero parameters.

struct GeneralizedInverseGaussian {
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
};

struct InverseGamma {
  double b = 1.0;
};

struct GammaPrior {
  double a = 1.0;
  double c = 1.0;
};

/// p(gamma) proportional to gamma^(c - 1).
struct ScaledJeffreys {
  double c = 1.0;
};

/// p(gamma) proportional to 1 / gamma.
struct Jeffreys {};

using Hyperprior = std::variant<GeneralizedInverseGaussian, InverseGamma, GammaPrior, ScaledJeffreys, Jeffreys>;

/// Gamma prior on the noise precision; shape = rate = 0 is Jeffreys' prior.
struct NoisePrior {
  double shape = 0.0;
  double rate = 0.0;
};

/// True for the members whose fixed points solve a polynomial equation.
bool has_fast_update(const Hyperprior& prior) noexcept;

/// Canonical CLI name: jeffreys, scaled-jeffreys, gamma, inverse-gamma, gig.
std::string prior_name(const Hyperprior& prior);

/// Builds a prior from its CLI name. Missing parameters take the defaults of
/// the corresponding struct.
Hyperprior make_prior(std::string_view name, std::optional<double> a = {}, std::optional<double> b = {},
                      std::optional<double> c = {});

/// Throws InvalidPrior unless the parameters are admissible for a block of
/// size `block_size` (ScaledJeffreys needs c > -rho d).
void validate_prior(const Hyperprior& prior, Index block_size, double rho);
void validate_noise_prior(const NoisePrior& prior);

/// Mean of q(gamma_i) given the expectation <x_i^H B_i x_i>. For the four
/// special cases this is the closed-form update; the general member goes
/// through gig_mean.
double gamma_update(const Hyperprior& prior, double expectation, Index block_size, double rho);

/// Mean of GIG(a_hat, b, c_hat): sqrt(b/a) K_{c+1}(sqrt(ab)) / K_c(sqrt(ab)).
///
/// For sqrt(ab) > 700 the Bessel functions underflow, and the leading terms of
/// the large-argument expansion sqrt(b/a) (1 + (c + 1/2) / sqrt(ab)) are
/// returned instead.
double gig_mean(double a_hat, double b, double c_hat);

/// One prior shared by all blocks, or one prior per block.
class PriorAssignment {
 public:
  PriorAssignment(Hyperprior shared) : priors_{std::move(shared)} {}  // NOLINT(google-explicit-constructor)
  /// Lets a single member such as Jeffreys{} stand for a shared prior.
  template <class P>
    requires std::is_constructible_v<Hyperprior, P> && (!std::is_same_v<std::decay_t<P>, Hyperprior>)
  PriorAssignment(P shared) : priors_{Hyperprior(std::move(shared))} {}  // NOLINT(google-explicit-constructor)
  explicit PriorAssignment(std::vector<Hyperprior> per_block) : priors_(std::move(per_block)) {}

  const Hyperprior& for_block(Index i) const {
    return priors_.size() == 1 ? priors_.front() : priors_.at(static_cast<std::size_t>(i));
  }
  std::size_t size() const noexcept { return priors_.size(); }
  bool shared() const noexcept { return priors_.size() == 1; }

 private:
  std::vector<Hyperprior> priors_;
};

}  // namespace vbsbl
