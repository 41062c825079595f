#pragma once

#include <limits>
#include <string_view>
#include <vector>

#include "vbsbl/core.hpp"
#include "vbsbl/hyperprior.hpp"
#include "vbsbl/model.hpp"
#include "vbsbl/polynomial.hpp"

namespace vbsbl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Eigen-coordinates of one block given the rest of the model.
///
/// s holds the eigenvalues of L_i^H Sigma_bar_i L_i and q the rotated data
/// vector lambda U_i^H L_i^H E_i^T Sigma_bar Phi^H y. Only |q_l|^2 enters
/// the fixed-point equations; q is stored as complex for both fields.
struct BlockLocalData {
  Eigen::VectorXd s;
  Eigen::VectorXcd q;
  double rho = 0.5;

  Index d() const noexcept { return s.size(); }
  double q_abs2(Index l) const { return std::norm(q[l]); }
};

/// Builds local data directly from s and |q| (tests, threshold sweep).
BlockLocalData make_local_data(const Eigen::VectorXd& s, const Eigen::VectorXd& q, double rho);

/// Sigma_bar restricted to the columns of the active blocks plus block i.
template <class Scalar>
struct SigmaBar {
  Mat<Scalar> matrix;
  std::vector<Index> blocks;  // ascending, contains i
  Index block = 0;            // i
  Index offset = 0;           // first row of block i inside `matrix`
};

/// (lambda Phi^H Phi + sum_{k active, k != i} gamma_k B_k)^{-1} on the
/// subspace of active blocks and block i. gamma_k = inf marks a pruned block.
template <class Scalar>
SigmaBar<Scalar> sigma_bar(const std::vector<double>& gamma, double lambda, const ProblemInstance<Scalar>& inst,
                           Index i);

template <class Scalar>
BlockLocalData block_local_data(const SigmaBar<Scalar>& sbar, const ProblemInstance<Scalar>& inst, double lambda);

/// Same quantities from the Schur complement C = Sigma_bar_i^{-1} and the
/// reduced data vector r (with Sigma_bar_i r equal to block i of
/// Sigma_bar Phi^H y). L is the Cholesky factor of B_i.
template <class Scalar>
BlockLocalData local_data_from_complement(const Mat<Scalar>& C, const Vec<Scalar>& r, const Mat<Scalar>& L,
                                          double lambda, double rho);

/// prod_l (1 + gamma s_l)^2, degree 2d.
Poly poly_A(const BlockLocalData& data);
/// sum_l (gamma s_l^2 + |q_l|^2 + s_l) prod_{j != l} (1 + gamma s_j)^2, degree 2d - 1.
Poly poly_B(const BlockLocalData& data);

/// Numerator of f(gamma) - gamma, so that sign G = sign(f - gamma).
///
/// Assembled without the leading-order cancellation of the textbook forms:
/// with G_J = sum_l [1 + gamma (s_l - |q_l|^2)] prod_{j != l}(1 + gamma s_j)^2
/// (which equals d A - gamma B),
///   Jeffreys          G_J
///   ScaledJeffreys    c A + rho G_J
///   Gamma             c A + rho G_J - (a/2) gamma A
///   InverseGamma      b A - 2 rho d gamma A + 2 rho gamma G_J
/// Throws UnsupportedPrior for the general GIG prior.
Poly poly_G(const Hyperprior& prior, const BlockLocalData& data);

/// h(gamma) = <x_i^H B_i x_i> evaluated as a sum of partial fractions.
double h_eval(const BlockLocalData& data, double gamma);
double h_derivative(const BlockLocalData& data, double gamma);

/// One alternating update gamma -> f(gamma).
double f_eval(const Hyperprior& prior, const BlockLocalData& data, double gamma);
/// |f'(gamma)|
double f_derivative(const Hyperprior& prior, const BlockLocalData& data, double gamma);

enum class LimitBranch {
  StartIsFixedPoint,  // gamma0 already solves f(gamma) = gamma
  SmallestAbove,      // f(gamma0) > gamma0, nearest retained root above
  LargestBelow,       // f(gamma0) <= gamma0, nearest retained root below
  Diverges,           // no retained root in the direction of motion
  FromInfinity,       // gamma0 = inf, largest retained root or inf
};

std::string_view to_string(LimitBranch branch) noexcept;

struct FixedPointResult {
  std::vector<double> roots;      // positive fixed points, ascending
  std::vector<double> stability;  // |f'| at each root
  std::vector<bool> retained;     // stability < chi
  double limit = kInf;
  LimitBranch branch = LimitBranch::Diverges;
};

/// Limit of gamma_{n+1} = f(gamma_n) started at gamma0 (which may be inf),
/// considering only fixed points with |f'| < chi.
FixedPointResult theorem1_limit(const Hyperprior& prior, const BlockLocalData& data, double gamma0,
                                double chi = 1.0, double tol_im = 1e-8);

}  // namespace vbsbl
