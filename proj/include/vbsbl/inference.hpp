#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "vbsbl/core.hpp"
#include "vbsbl/fastupdate.hpp"
#include "vbsbl/hyperprior.hpp"
#include "vbsbl/model.hpp"

namespace vbsbl {

struct SolverConfig {
  int max_iterations = 200;
  double objective_rel_tol = 1e-6;
  /// Iterations that restart every block update from gamma0 = 0.
  int warm_start_iterations = 3;
  /// Stability threshold on |f'| for admissible fixed points.
  double chi = 1.0;
  NoisePrior noise_prior{};
  double tol_im = 1e-8;
  /// slow_solve marks a block pruned once its gamma exceeds this value.
  double prune_threshold = 1e10;
  std::uint64_t seed = 0;
  /// Pins lambda instead of updating it.
  std::optional<double> fixed_noise_precision;
};

void validate_config(const SolverConfig& config);

/// Variational posterior over the weights plus point estimates of gamma and
/// lambda. gamma_i = inf marks a pruned block; sigma_hat lives on the active
/// blocks in ascending order.
template <class Scalar>
struct PosteriorState {
  std::vector<double> gamma;
  double lambda = 1.0;
  Vec<Scalar> x_hat;
  Mat<Scalar> sigma_hat;
  std::vector<Index> active_blocks;
  int iterations = 0;
  double objective = 0.0;
  bool converged = false;
  std::vector<double> objective_trace;

  bool is_active(Index i) const { return std::isfinite(gamma[static_cast<std::size_t>(i)]); }
};

/// Blocks with finite gamma, ascending.
std::vector<Index> active_set(const std::vector<double>& gamma);

/// x_hat = lambda Sigma_hat Phi^H y and Sigma_hat = (lambda Phi^H Phi + B_gamma)^{-1}
/// on the active blocks; pruned entries of x_hat are exactly zero.
template <class Scalar>
void update_weights(PosteriorState<Scalar>& state, const ProblemInstance<Scalar>& inst);

/// (rho N + eps) / (rho (||y - Phi x||^2 + tr(Phi^H Phi Sigma)) + eta). With
/// eps = eta = 0 a floor of 1e-12 rho ||y||^2 is added to the denominator.
template <class Scalar>
double update_noise(const PosteriorState<Scalar>& state, const ProblemInstance<Scalar>& inst,
                    const NoisePrior& prior);

/// <x_i^H B_i x_i> = x_i^H B_i x_i + tr(B_i Sigma_i) for an active block.
template <class Scalar>
double expected_block_energy(const PosteriorState<Scalar>& state, const ProblemInstance<Scalar>& inst, Index i);

/// Log marginal likelihood of (gamma, lambda) with constants dropped:
///   rho [N ln lambda - lambda ||y||^2 + ln|Sigma| + lambda^2 y^H Phi Sigma Phi^H y
///        + sum_active (d_i ln gamma_i + ln|B_i|)].
template <class Scalar>
double objective(const std::vector<double>& gamma, double lambda, const ProblemInstance<Scalar>& inst);

/// Alternates closed-form fixed-point limits for each block with the noise
/// update. Requires one of the four polynomial priors for every block.
template <class Scalar>
PosteriorState<Scalar> fast_solve(const ProblemInstance<Scalar>& inst, const PriorAssignment& prior,
                                  const SolverConfig& config = {});

/// Classic simultaneous updates of q_x, every gamma_i and lambda. Accepts the
/// general GIG prior.
template <class Scalar>
PosteriorState<Scalar> slow_solve(const ProblemInstance<Scalar>& inst, const PriorAssignment& prior,
                                  const SolverConfig& config = {});

}  // namespace vbsbl
