#include "vbsbl/hyperprior.hpp"

#include <cmath>
#include <sstream>

namespace vbsbl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::InvalidPrior, message);
}

}  // namespace

bool has_fast_update(const Hyperprior& prior) noexcept {
  return !std::holds_alternative<GeneralizedInverseGaussian>(prior);
}

std::string prior_name(const Hyperprior& prior) {
  return std::visit(overloaded{
                        [](const GeneralizedInverseGaussian&) { return std::string("gig"); },
                        [](const InverseGamma&) { return std::string("inverse-gamma"); },
                        [](const GammaPrior&) { return std::string("gamma"); },
                        [](const ScaledJeffreys&) { return std::string("scaled-jeffreys"); },
                        [](const Jeffreys&) { return std::string("jeffreys"); },
                    },
                    prior);
}

Hyperprior make_prior(std::string_view name, std::optional<double> a, std::optional<double> b,
                      std::optional<double> c) {
  if (name == "jeffreys") return Jeffreys{};
  if (name == "scaled-jeffreys") return ScaledJeffreys{c.value_or(ScaledJeffreys{}.c)};
  if (name == "gamma") return GammaPrior{a.value_or(GammaPrior{}.a), c.value_or(GammaPrior{}.c)};
  if (name == "inverse-gamma") return InverseGamma{b.value_or(InverseGamma{}.b)};
  if (name == "gig") {
    GeneralizedInverseGaussian g;
    return GeneralizedInverseGaussian{a.value_or(g.a), b.value_or(g.b), c.value_or(g.c)};
  }
  throw Error(ErrorCode::InvalidPrior, "unknown prior '" + std::string(name) + "'");
}

void validate_prior(const Hyperprior& prior, Index block_size, double rho) {
  std::visit(overloaded{
                 [](const GeneralizedInverseGaussian& p) {
                   require(p.a > 0 && std::isfinite(p.a), "GIG prior needs a > 0");
                   require(p.b > 0 && std::isfinite(p.b), "GIG prior needs b > 0");
                   require(std::isfinite(p.c), "GIG prior needs finite c");
                 },
                 [](const InverseGamma& p) { require(p.b > 0 && std::isfinite(p.b), "inverse Gamma prior needs b > 0"); },
                 [](const GammaPrior& p) {
                   require(p.a > 0 && std::isfinite(p.a), "Gamma prior needs a > 0");
                   require(p.c > 0 && std::isfinite(p.c), "Gamma prior needs c > 0");
                 },
                 [&](const ScaledJeffreys& p) {
                   std::ostringstream os;
                   os << "scaled Jeffreys prior needs c > -rho d = " << -rho * static_cast<double>(block_size);
                   require(std::isfinite(p.c) && p.c > -rho * static_cast<double>(block_size), os.str());
                 },
                 [](const Jeffreys&) {},
             },
             prior);
}

void validate_noise_prior(const NoisePrior& prior) {
  if (!(prior.shape >= 0.0) || !(prior.rate >= 0.0) || !std::isfinite(prior.shape) ||
      !std::isfinite(prior.rate)) {
    throw Error(ErrorCode::InvalidPrior, "noise prior shape and rate must be finite and nonnegative");
  }
}

double gamma_update(const Hyperprior& prior, double expectation, Index block_size, double rho) {
  const double d = static_cast<double>(block_size);
  return std::visit(overloaded{
                        [&](const GeneralizedInverseGaussian& p) {
                          return gig_mean(2.0 * rho * expectation + p.a, p.b, p.c + rho * d);
                        },
                        [&](const InverseGamma& p) { return std::sqrt(p.b / (2.0 * rho * expectation)); },
                        [&](const GammaPrior& p) { return (p.c + rho * d) / (rho * expectation + 0.5 * p.a); },
                        [&](const ScaledJeffreys& p) { return (p.c + rho * d) / (rho * expectation); },
                        [&](const Jeffreys&) { return d / expectation; },
                    },
                    prior);
}

double gig_mean(double a_hat, double b, double c_hat) {
  if (!(a_hat > 0.0) || !(b > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "gig_mean needs a_hat > 0 and b > 0");
  }
  const double z = std::sqrt(a_hat * b);
  const double scale = std::sqrt(b / a_hat);
  auto asymptotic = [&] { return scale * (1.0 + (c_hat + 0.5) / z); };
  if (z > 700.0) return asymptotic();
  // K_{-nu} = K_nu, and libstdc++ only accepts nonnegative orders.
  const double upper = std::cyl_bessel_k(std::abs(c_hat + 1.0), z);
  const double lower = std::cyl_bessel_k(std::abs(c_hat), z);
  const double ratio = upper / lower;
  if (!std::isfinite(ratio) || !(lower > 0.0)) return asymptotic();
  return scale * ratio;
}

}  // namespace vbsbl
