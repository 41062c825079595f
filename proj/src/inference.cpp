#include "vbsbl/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vbsbl/detail/workspace.hpp"

namespace vbsbl {

namespace {

template <class Scalar>
void check_priors(const ProblemInstance<Scalar>& inst, const PriorAssignment& prior, bool fast) {
  const Index K = inst.block_count();
  if (!prior.shared() && static_cast<Index>(prior.size()) != K) {
    throw Error(ErrorCode::InvalidPrior, "expected one prior or one prior per block");
  }
  for (Index i = 0; i < K; ++i) {
    const Hyperprior& p = prior.for_block(i);
    if (fast && !has_fast_update(p)) {
      throw Error(ErrorCode::UnsupportedPrior, "the fast solver needs a polynomial prior for block " +
                                                   std::to_string(i) + "; use slow_solve for the GIG prior");
    }
    validate_prior(p, inst.blocks().size(i), inst.rho());
  }
}

template <class Scalar>
Mat<Scalar> gather_columns(const ProblemInstance<Scalar>& inst, const std::vector<Index>& blocks) {
  Mat<Scalar> out(inst.rows(), inst.blocks().dim_of(blocks));
  Index c = 0;
  for (Index k : blocks) {
    out.middleCols(c, inst.blocks().size(k)) = inst.block_columns(k);
    c += inst.blocks().size(k);
  }
  return out;
}

template <class Scalar>
Eigen::LLT<Mat<Scalar>> factor_precision(const ProblemInstance<Scalar>& inst, const std::vector<Index>& blocks,
                                         const Mat<Scalar>& gram, const std::vector<double>& gamma, double lambda) {
  Mat<Scalar> M = lambda * gram;
  Index r = 0;
  for (Index k : blocks) {
    const Index dk = inst.blocks().size(k);
    M.block(r, r, dk, dk) += gamma[static_cast<std::size_t>(k)] * inst.precision(k);
    r += dk;
  }
  Eigen::LLT<Mat<Scalar>> llt(M);
  if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().real().array() > 0.0).all()) {
    throw Error(ErrorCode::SingularMatrix, "posterior precision on the active set is not positive definite");
  }
  return llt;
}

template <class Scalar>
double trace_product(const Mat<Scalar>& a, const Mat<Scalar>& b) {
  return std::real(a.cwiseProduct(b.transpose()).sum());
}

double noise_precision(double rho, Index n, double y2, double resid2, double trace, const NoisePrior& prior) {
  double den = rho * (resid2 + trace) + prior.rate;
  if (prior.shape == 0.0 && prior.rate == 0.0) den += 1e-12 * rho * y2;
  return (rho * static_cast<double>(n) + prior.shape) / den;
}

template <class Scalar>
double active_prior_terms(const ProblemInstance<Scalar>& inst, const std::vector<Index>& blocks,
                          const std::vector<double>& gamma) {
  double acc = 0.0;
  for (Index k : blocks) {
    acc += static_cast<double>(inst.blocks().size(k)) * std::log(gamma[static_cast<std::size_t>(k)]) +
           inst.precision_logdet(k);
  }
  return acc;
}

template <class Scalar>
PosteriorState<Scalar> empty_model(const ProblemInstance<Scalar>& inst, double lambda) {
  PosteriorState<Scalar> state;
  state.gamma.assign(static_cast<std::size_t>(inst.block_count()), kInf);
  state.lambda = lambda;
  state.x_hat = Vec<Scalar>::Zero(inst.cols());
  state.sigma_hat = Mat<Scalar>(0, 0);
  state.converged = true;
  return state;
}

bool relative_close(double a, double b, double tol) {
  if (a == b) return true;
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

void validate_config(const SolverConfig& config) {
  if (config.max_iterations < 1) throw Error(ErrorCode::ConfigError, "max_iterations must be at least 1");
  if (config.warm_start_iterations < 0) throw Error(ErrorCode::ConfigError, "warm_start_iterations must be >= 0");
  if (!(config.chi > 0.0 && config.chi <= 1.0)) throw Error(ErrorCode::ConfigError, "chi must lie in (0, 1]");
  if (!(config.objective_rel_tol >= 0.0)) throw Error(ErrorCode::ConfigError, "objective_rel_tol must be >= 0");
  if (!(config.tol_im > 0.0)) throw Error(ErrorCode::ConfigError, "tol_im must be positive");
  if (!(config.prune_threshold > 0.0)) throw Error(ErrorCode::ConfigError, "prune_threshold must be positive");
  if (config.fixed_noise_precision && !(*config.fixed_noise_precision > 0.0)) {
    throw Error(ErrorCode::ConfigError, "fixed noise precision must be positive");
  }
  validate_noise_prior(config.noise_prior);
}

std::vector<Index> active_set(const std::vector<double>& gamma) {
  std::vector<Index> out;
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    if (std::isfinite(gamma[k])) out.push_back(static_cast<Index>(k));
  }
  return out;
}

template <class Scalar>
void update_weights(PosteriorState<Scalar>& state, const ProblemInstance<Scalar>& inst) {
  if (static_cast<Index>(state.gamma.size()) != inst.block_count()) {
    throw Error(ErrorCode::DimensionMismatch, "need one gamma per block");
  }
  state.active_blocks = active_set(state.gamma);
  state.x_hat = Vec<Scalar>::Zero(inst.cols());
  if (state.active_blocks.empty()) {
    state.sigma_hat = Mat<Scalar>(0, 0);
    return;
  }
  const Mat<Scalar> phi = gather_columns(inst, state.active_blocks);
  const auto llt = factor_precision<Scalar>(inst, state.active_blocks, phi.adjoint() * phi, state.gamma,
                                            state.lambda);
  state.sigma_hat = llt.solve(Mat<Scalar>::Identity(phi.cols(), phi.cols()));
  const Vec<Scalar> xs = state.lambda * (state.sigma_hat * (phi.adjoint() * inst.y()));
  Index r = 0;
  for (Index k : state.active_blocks) {
    const Index dk = inst.blocks().size(k);
    state.x_hat.segment(inst.blocks().offset(k), dk) = xs.segment(r, dk);
    r += dk;
  }
}

template <class Scalar>
double update_noise(const PosteriorState<Scalar>& state, const ProblemInstance<Scalar>& inst,
                    const NoisePrior& prior) {
  const double resid2 = (inst.y() - inst.dictionary() * state.x_hat).squaredNorm();
  double trace = 0.0;
  if (!state.active_blocks.empty()) {
    const Mat<Scalar> phi = gather_columns(inst, state.active_blocks);
    trace = trace_product<Scalar>(phi.adjoint() * phi, state.sigma_hat);
  }
  return noise_precision(inst.rho(), inst.rows(), inst.y_norm2(), resid2, trace, prior);
}

template <class Scalar>
double expected_block_energy(const PosteriorState<Scalar>& state, const ProblemInstance<Scalar>& inst, Index i) {
  Index r = 0;
  for (Index k : state.active_blocks) {
    const Index dk = inst.blocks().size(k);
    if (k == i) {
      const auto x = state.x_hat.segment(inst.blocks().offset(k), dk);
      const Mat<Scalar>& B = inst.precision(k);
      const double quad = std::real(x.dot(B * x));
      return quad + trace_product<Scalar>(B, state.sigma_hat.block(r, r, dk, dk));
    }
    r += dk;
  }
  throw Error(ErrorCode::InvalidArgument, "block " + std::to_string(i) + " is not active");
}

template <class Scalar>
double objective(const std::vector<double>& gamma, double lambda, const ProblemInstance<Scalar>& inst) {
  const double rho = inst.rho();
  const double n = static_cast<double>(inst.rows());
  double value = n * std::log(lambda) - lambda * inst.y_norm2();
  const std::vector<Index> blocks = active_set(gamma);
  if (!blocks.empty()) {
    const Mat<Scalar> phi = gather_columns(inst, blocks);
    const auto llt = factor_precision<Scalar>(inst, blocks, phi.adjoint() * phi, gamma, lambda);
    const Vec<Scalar> z = llt.matrixL().solve(phi.adjoint() * inst.y());
    value += -2.0 * llt.matrixLLT().diagonal().real().array().log().sum() + lambda * lambda * z.squaredNorm() +
             active_prior_terms(inst, blocks, gamma);
  }
  return rho * value;
}

template <class Scalar>
PosteriorState<Scalar> fast_solve(const ProblemInstance<Scalar>& inst, const PriorAssignment& prior,
                                  const SolverConfig& config) {
  validate_config(config);
  check_priors(inst, prior, true);
  const Index K = inst.block_count();
  const double rho = inst.rho();
  const double y2 = inst.y_norm2();
  if (y2 == 0.0) return empty_model(inst, config.fixed_noise_precision.value_or(kInf));

  PosteriorState<Scalar> state;
  state.gamma.assign(static_cast<std::size_t>(K), kInf);
  state.lambda = config.fixed_noise_precision.value_or(2.0 * static_cast<double>(inst.rows()) / y2);

  detail::GramCache<Scalar> gram(inst);
  detail::ActiveFactor<Scalar> factor;
  detail::ActiveFactor<Scalar> scratch;
  bool factor_valid = false;
  auto refresh = [&] {
    if (!factor_valid) {
      factor.compute(gram, inst, active_set(state.gamma), state.gamma, state.lambda);
      factor_valid = true;
    }
  };

  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int n = 1; n <= config.max_iterations; ++n) {
    bool support_changed = false;
    for (Index i = 0; i < K; ++i) {
      const double old_gamma = state.gamma[static_cast<std::size_t>(i)];
      BlockLocalData data;
      if (std::isfinite(old_gamma)) {
        std::vector<Index> others = active_set(state.gamma);
        others.erase(std::find(others.begin(), others.end(), i));
        scratch.compute(gram, inst, std::move(others), state.gamma, state.lambda);
        data = detail::schur_local_data(gram, scratch, inst, i, state.lambda);
      } else {
        refresh();
        data = detail::schur_local_data(gram, factor, inst, i, state.lambda);
      }
      const double gamma0 = n <= config.warm_start_iterations ? 0.0 : old_gamma;
      const double updated =
          theorem1_limit(prior.for_block(i), data, gamma0, config.chi, config.tol_im).limit;
      if (updated != old_gamma) {
        support_changed |= std::isfinite(updated) != std::isfinite(old_gamma);
        state.gamma[static_cast<std::size_t>(i)] = updated;
        factor_valid = false;
      }
    }

    refresh();
    state.active_blocks = factor.blocks();
    Vec<Scalar> xs;
    Mat<Scalar> sigma = factor.inverse();
    if (!factor.empty()) xs = state.lambda * (sigma * gram.gather_phi_y(factor.blocks()));

    if (!config.fixed_noise_precision) {
      Vec<Scalar> resid = inst.y();
      double trace = 0.0;
      if (!factor.empty()) {
        resid.noalias() -= gather_columns(inst, factor.blocks()) * xs;
        trace = trace_product<Scalar>(gram.gather(factor.blocks(), factor.blocks()), sigma);
      }
      state.lambda = noise_precision(rho, inst.rows(), y2, resid.squaredNorm(), trace, config.noise_prior);
      factor_valid = false;
      refresh();
      sigma = factor.inverse();
      if (!factor.empty()) xs = state.lambda * (sigma * gram.gather_phi_y(factor.blocks()));
    }

    double value = static_cast<double>(inst.rows()) * std::log(state.lambda) - state.lambda * y2;
    if (!factor.empty()) {
      const Vec<Scalar> z = factor.llt().matrixL().solve(gram.gather_phi_y(factor.blocks()));
      value += -factor.logdet() + state.lambda * state.lambda * z.squaredNorm() +
               active_prior_terms(inst, factor.blocks(), state.gamma);
    }
    state.objective = rho * value;
    state.objective_trace.push_back(state.objective);
    state.iterations = n;

    state.x_hat = Vec<Scalar>::Zero(inst.cols());
    Index r = 0;
    for (Index k : factor.blocks()) {
      const Index dk = inst.blocks().size(k);
      state.x_hat.segment(inst.blocks().offset(k), dk) = xs.segment(r, dk);
      r += dk;
    }
    state.sigma_hat = std::move(sigma);

    if (n >= 2 && !support_changed && relative_close(state.objective, previous, config.objective_rel_tol)) {
      state.converged = true;
      break;
    }
    previous = state.objective;
  }
  return state;
}

template <class Scalar>
PosteriorState<Scalar> slow_solve(const ProblemInstance<Scalar>& inst, const PriorAssignment& prior,
                                  const SolverConfig& config) {
  validate_config(config);
  check_priors(inst, prior, false);
  const Index K = inst.block_count();
  const double y2 = inst.y_norm2();
  if (y2 == 0.0) return empty_model(inst, config.fixed_noise_precision.value_or(kInf));

  PosteriorState<Scalar> state;
  state.gamma.assign(static_cast<std::size_t>(K), 1.0);
  state.lambda = config.fixed_noise_precision.value_or(2.0 * static_cast<double>(inst.rows()) / y2);

  for (int n = 1; n <= config.max_iterations; ++n) {
    update_weights(state, inst);
    bool support_changed = false;
    double max_change = 0.0;
    std::vector<double> next = state.gamma;
    for (Index i : state.active_blocks) {
      const auto ui = static_cast<std::size_t>(i);
      double g = gamma_update(prior.for_block(i), expected_block_energy(state, inst, i), inst.blocks().size(i),
                              inst.rho());
      if (!(g <= config.prune_threshold)) {
        g = kInf;
        support_changed = true;
      } else {
        max_change = std::max(max_change, std::abs(g - state.gamma[ui]) / std::max(g, state.gamma[ui]));
      }
      next[ui] = g;
    }
    if (!config.fixed_noise_precision) state.lambda = update_noise(state, inst, config.noise_prior);
    state.gamma = std::move(next);
    state.iterations = n;
    state.objective = objective(state.gamma, state.lambda, inst);
    state.objective_trace.push_back(state.objective);
    if (n >= 2 && !support_changed && max_change <= config.objective_rel_tol) {
      state.converged = true;
      break;
    }
  }
  update_weights(state, inst);
  return state;
}

template void update_weights(PosteriorState<Real>&, const ProblemInstance<Real>&);
template void update_weights(PosteriorState<Complex>&, const ProblemInstance<Complex>&);
template double update_noise(const PosteriorState<Real>&, const ProblemInstance<Real>&, const NoisePrior&);
template double update_noise(const PosteriorState<Complex>&, const ProblemInstance<Complex>&, const NoisePrior&);
template double expected_block_energy(const PosteriorState<Real>&, const ProblemInstance<Real>&, Index);
template double expected_block_energy(const PosteriorState<Complex>&, const ProblemInstance<Complex>&, Index);
template double objective(const std::vector<double>&, double, const ProblemInstance<Real>&);
template double objective(const std::vector<double>&, double, const ProblemInstance<Complex>&);
template PosteriorState<Real> fast_solve(const ProblemInstance<Real>&, const PriorAssignment&, const SolverConfig&);
template PosteriorState<Complex> fast_solve(const ProblemInstance<Complex>&, const PriorAssignment&,
                                            const SolverConfig&);
template PosteriorState<Real> slow_solve(const ProblemInstance<Real>&, const PriorAssignment&, const SolverConfig&);
template PosteriorState<Complex> slow_solve(const ProblemInstance<Complex>&, const PriorAssignment&,
                                            const SolverConfig&);

}  // namespace vbsbl
