#include "vbsbl/fastupdate.hpp"

#include <algorithm>
#include <cmath>

namespace vbsbl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void clamp_eigenvalues(Eigen::VectorXd& s) {
  if (s.size() == 0) return;
  const double eps = 1e-12 * std::max(s.maxCoeff(), 1.0);
  for (Index l = 0; l < s.size(); ++l) s[l] = std::max(s[l], eps);
}

Poly square_factor(double s) { return {1.0, 2.0 * s, s * s}; }

/// prod_{j != skip} (1 + gamma s_j)^2; skip = -1 keeps every factor.
Poly product_except(const BlockLocalData& data, Index skip) {
  Poly out{1.0};
  for (Index j = 0; j < data.d(); ++j) {
    if (j != skip) out = poly_mul(out, square_factor(data.s[j]));
  }
  return out;
}

Poly poly_GJ(const BlockLocalData& data) {
  Poly out;
  for (Index l = 0; l < data.d(); ++l) {
    const Poly linear{1.0, data.s[l] - data.q_abs2(l)};
    out = poly_axpy(out, 1.0, poly_mul(linear, product_except(data, l)));
  }
  return out;
}

/// G_J / A = d - gamma h, summed term by term.
double gj_ratio(const BlockLocalData& data, double gamma) {
  double acc = 0.0;
  for (Index l = 0; l < data.d(); ++l) {
    const double s = data.s[l];
    const double den = 1.0 + gamma * s;
    acc += (1.0 + gamma * (s - data.q_abs2(l))) / (den * den);
  }
  return acc;
}

double gj_ratio_derivative(const BlockLocalData& data, double gamma) {
  double acc = 0.0;
  for (Index l = 0; l < data.d(); ++l) {
    const double s = data.s[l];
    const double a = s - data.q_abs2(l);
    const double den = 1.0 + gamma * s;
    acc += (a - 2.0 * s - gamma * a * s) / (den * den * den);
  }
  return acc;
}

[[noreturn]] void unsupported() {
  throw Error(ErrorCode::UnsupportedPrior, "the general GIG prior has no fixed-point polynomial");
}

/// G(gamma) / A(gamma) and its derivative.
std::pair<double, double> rational_residual(const Hyperprior& prior, const BlockLocalData& data, double gamma) {
  const double rho = data.rho;
  const double d = static_cast<double>(data.d());
  const double g = gj_ratio(data, gamma);
  const double dg = gj_ratio_derivative(data, gamma);
  return std::visit(overloaded{
                        [&](const GeneralizedInverseGaussian&) -> std::pair<double, double> { unsupported(); },
                        [&](const InverseGamma& p) {
                          return std::pair{p.b - 2.0 * rho * d * gamma + 2.0 * rho * gamma * g,
                                           -2.0 * rho * d + 2.0 * rho * (g + gamma * dg)};
                        },
                        [&](const GammaPrior& p) {
                          return std::pair{p.c + rho * g - 0.5 * p.a * gamma, rho * dg - 0.5 * p.a};
                        },
                        [&](const ScaledJeffreys& p) { return std::pair{p.c + rho * g, rho * dg}; },
                        [&](const Jeffreys&) { return std::pair{g, dg}; },
                    },
                    prior);
}

double polish_root(const Hyperprior& prior, const BlockLocalData& data, double r) {
  auto [value, slope] = rational_residual(prior, data, r);
  for (int k = 0; k < 20 && value != 0.0; ++k) {
    if (slope == 0.0 || !std::isfinite(slope)) break;
    const double next = r - value / slope;
    if (!(next > 0.0) || !std::isfinite(next)) break;
    const auto [next_value, next_slope] = rational_residual(prior, data, next);
    if (!(std::abs(next_value) < std::abs(value))) break;
    r = next;
    value = next_value;
    slope = next_slope;
  }
  return r;
}

}  // namespace

BlockLocalData make_local_data(const Eigen::VectorXd& s, const Eigen::VectorXd& q, double rho) {
  if (s.size() != q.size()) throw Error(ErrorCode::DimensionMismatch, "s and q must have equal length");
  if ((s.array() < 0.0).any()) throw Error(ErrorCode::InvalidArgument, "eigenvalues must be nonnegative");
  BlockLocalData data;
  data.s = s;
  clamp_eigenvalues(data.s);
  data.q = q.cast<Complex>();
  data.rho = rho;
  return data;
}

template <class Scalar>
SigmaBar<Scalar> sigma_bar(const std::vector<double>& gamma, double lambda, const ProblemInstance<Scalar>& inst,
                           Index i) {
  const auto& blocks = inst.blocks();
  if (static_cast<Index>(gamma.size()) != blocks.count()) {
    throw Error(ErrorCode::DimensionMismatch, "need one gamma per block");
  }
  if (i < 0 || i >= blocks.count()) throw Error(ErrorCode::InvalidArgument, "block index out of range");
  if (!(lambda > 0.0)) throw Error(ErrorCode::SingularMatrix, "noise precision must be positive");

  SigmaBar<Scalar> out;
  out.block = i;
  Index dim = 0;
  for (Index k = 0; k < blocks.count(); ++k) {
    if (k == i || std::isfinite(gamma[static_cast<std::size_t>(k)])) {
      if (k == i) out.offset = dim;
      out.blocks.push_back(k);
      dim += blocks.size(k);
    }
  }
  Mat<Scalar> phi(inst.rows(), dim);
  Index col = 0;
  for (Index k : out.blocks) {
    phi.middleCols(col, blocks.size(k)) = inst.block_columns(k);
    col += blocks.size(k);
  }
  Mat<Scalar> M = lambda * phi.adjoint() * phi;
  col = 0;
  for (Index k : out.blocks) {
    const Index dk = blocks.size(k);
    if (k != i) M.block(col, col, dk, dk) += gamma[static_cast<std::size_t>(k)] * inst.precision(k);
    col += dk;
  }
  Eigen::LLT<Mat<Scalar>> llt(M);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularMatrix, "Sigma_bar for block " + std::to_string(i) + " is singular");
  }
  out.matrix = llt.solve(Mat<Scalar>::Identity(dim, dim));
  return out;
}

template <class Scalar>
BlockLocalData block_local_data(const SigmaBar<Scalar>& sbar, const ProblemInstance<Scalar>& inst, double lambda) {
  const auto& blocks = inst.blocks();
  const Index i = sbar.block;
  const Index d = blocks.size(i);
  Vec<Scalar> b(sbar.matrix.rows());
  Index col = 0;
  for (Index k : sbar.blocks) {
    b.segment(col, blocks.size(k)) = inst.block_columns(k).adjoint() * inst.y();
    col += blocks.size(k);
  }
  const Vec<Scalar> t = sbar.matrix.middleRows(sbar.offset, d) * b;
  const Mat<Scalar>& L = inst.precision_factor(i);
  const Mat<Scalar> K = L.adjoint() * sbar.matrix.block(sbar.offset, sbar.offset, d, d) * L;
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> eig(0.5 * (K + K.adjoint()));
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "Hermitian eigensolver did not converge");

  BlockLocalData data;
  data.rho = inst.rho();
  data.s = eig.eigenvalues();
  clamp_eigenvalues(data.s);
  const Vec<Scalar> q = lambda * eig.eigenvectors().adjoint() * (L.adjoint() * t);
  data.q = q.template cast<Complex>();
  return data;
}

template <class Scalar>
BlockLocalData local_data_from_complement(const Mat<Scalar>& C, const Vec<Scalar>& r, const Mat<Scalar>& L,
                                          double lambda, double rho) {
  const auto tri = L.template triangularView<Eigen::Lower>();
  Mat<Scalar> W = tri.solve(C);
  W = tri.solve(W.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> eig(0.5 * (W + W.adjoint()));
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "Hermitian eigensolver did not converge");

  Eigen::VectorXd ev = eig.eigenvalues();
  const double floor = 1e-14 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  BlockLocalData data;
  data.rho = rho;
  data.s.resize(ev.size());
  for (Index l = 0; l < ev.size(); ++l) data.s[l] = 1.0 / std::max(ev[l], floor);
  const Vec<Scalar> v = eig.eigenvectors().adjoint() * tri.solve(r);
  data.q.resize(ev.size());
  for (Index l = 0; l < ev.size(); ++l) data.q[l] = Complex(lambda * data.s[l]) * Complex(v[l]);
  // No relative clamp here: s >= 1 / max(ev) > 0 already, and a singular C
  // (a block with dependent columns) yields one huge s that must not drag the
  // others up with it.
  return data;
}

Poly poly_A(const BlockLocalData& data) { return product_except(data, -1); }

Poly poly_B(const BlockLocalData& data) {
  Poly out;
  for (Index l = 0; l < data.d(); ++l) {
    const double s = data.s[l];
    const Poly linear{data.q_abs2(l) + s, s * s};
    out = poly_axpy(out, 1.0, poly_mul(linear, product_except(data, l)));
  }
  return out;
}

Poly poly_G(const Hyperprior& prior, const BlockLocalData& data) {
  const double rho = data.rho;
  const double d = static_cast<double>(data.d());
  Poly G = std::visit(overloaded{
                          [&](const GeneralizedInverseGaussian&) -> Poly { unsupported(); },
                          [&](const InverseGamma& p) {
                            const Poly A = poly_A(data);
                            Poly g = poly_axpy(poly_axpy({}, p.b, A), -2.0 * rho * d, poly_shift(A, 1));
                            return poly_axpy(g, 2.0 * rho, poly_shift(poly_GJ(data), 1));
                          },
                          [&](const GammaPrior& p) {
                            const Poly A = poly_A(data);
                            Poly g = poly_axpy(poly_axpy({}, p.c, A), rho, poly_GJ(data));
                            return poly_axpy(g, -0.5 * p.a, poly_shift(A, 1));
                          },
                          [&](const ScaledJeffreys& p) {
                            return poly_axpy(poly_axpy({}, p.c, poly_A(data)), rho, poly_GJ(data));
                          },
                          [&](const Jeffreys&) { return poly_GJ(data); },
                      },
                      prior);
  poly_trim(G);
  return G;
}

double h_eval(const BlockLocalData& data, double gamma) {
  double acc = 0.0;
  for (Index l = 0; l < data.d(); ++l) {
    const double s = data.s[l];
    const double den = 1.0 + gamma * s;
    acc += (gamma * s * s + data.q_abs2(l) + s) / (den * den);
  }
  return acc;
}

double h_derivative(const BlockLocalData& data, double gamma) {
  double acc = 0.0;
  for (Index l = 0; l < data.d(); ++l) {
    const double s = data.s[l];
    const double den = 1.0 + gamma * s;
    acc -= (gamma * s * s * s + 2.0 * s * data.q_abs2(l) + s * s) / (den * den * den);
  }
  return acc;
}

double f_eval(const Hyperprior& prior, const BlockLocalData& data, double gamma) {
  const double h = h_eval(data, gamma);
  const double rho = data.rho;
  const double d = static_cast<double>(data.d());
  return std::visit(overloaded{
                        [&](const GeneralizedInverseGaussian&) -> double { unsupported(); },
                        [&](const InverseGamma& p) { return std::sqrt(p.b / (2.0 * rho * h)); },
                        [&](const GammaPrior& p) { return (p.c + rho * d) / (rho * h + 0.5 * p.a); },
                        [&](const ScaledJeffreys& p) { return (p.c + rho * d) / (rho * h); },
                        [&](const Jeffreys&) { return d / h; },
                    },
                    prior);
}

double f_derivative(const Hyperprior& prior, const BlockLocalData& data, double gamma) {
  const double h = h_eval(data, gamma);
  const double dh = h_derivative(data, gamma);
  const double rho = data.rho;
  const double d = static_cast<double>(data.d());
  const double df = std::visit(
      overloaded{
          [&](const GeneralizedInverseGaussian&) -> double { unsupported(); },
          [&](const InverseGamma& p) { return -0.5 * std::sqrt(p.b / (2.0 * rho)) * std::pow(h, -1.5) * dh; },
          [&](const GammaPrior& p) {
            const double den = rho * h + 0.5 * p.a;
            return -(p.c + rho * d) * rho * dh / (den * den);
          },
          [&](const ScaledJeffreys& p) { return -(p.c + rho * d) * dh / (rho * h * h); },
          [&](const Jeffreys&) { return -d * dh / (h * h); },
      },
      prior);
  return std::abs(df);
}

std::string_view to_string(LimitBranch branch) noexcept {
  switch (branch) {
    case LimitBranch::StartIsFixedPoint: return "start-is-fixed-point";
    case LimitBranch::SmallestAbove: return "smallest-above";
    case LimitBranch::LargestBelow: return "largest-below";
    case LimitBranch::Diverges: return "diverges";
    case LimitBranch::FromInfinity: return "from-infinity";
  }
  return "unknown";
}

FixedPointResult theorem1_limit(const Hyperprior& prior, const BlockLocalData& data, double gamma0, double chi,
                                double tol_im) {
  if (!(gamma0 >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma0 must be nonnegative");
  if (!(chi > 0.0 && chi <= 1.0)) throw Error(ErrorCode::InvalidArgument, "chi must lie in (0, 1]");

  FixedPointResult out;
  std::vector<double> roots = positive_real_roots(poly_G(prior, data), tol_im);
  for (double& r : roots) r = polish_root(prior, data, r);
  std::sort(roots.begin(), roots.end());
  for (double r : roots) {
    if (!out.roots.empty() && std::abs(r - out.roots.back()) <= 1e-8 * std::max(r, out.roots.back())) continue;
    out.roots.push_back(r);
  }
  for (double r : out.roots) {
    const double stab = f_derivative(prior, data, r);
    out.stability.push_back(stab);
    out.retained.push_back(stab < chi);
  }

  std::vector<double> kept;
  for (std::size_t k = 0; k < out.roots.size(); ++k) {
    if (out.retained[k]) kept.push_back(out.roots[k]);
  }

  if (std::isinf(gamma0)) {
    out.branch = LimitBranch::FromInfinity;
    out.limit = kept.empty() ? kInf : kept.back();
    return out;
  }
  for (double r : kept) {
    if (std::abs(r - gamma0) <= 1e-9 * std::max(r, gamma0)) {
      out.branch = LimitBranch::StartIsFixedPoint;
      out.limit = r;
      return out;
    }
  }
  if (rational_residual(prior, data, gamma0).first > 0.0) {
    auto above = std::upper_bound(kept.begin(), kept.end(), gamma0);
    if (above == kept.end()) {
      out.branch = LimitBranch::Diverges;
      out.limit = kInf;
    } else {
      out.branch = LimitBranch::SmallestAbove;
      out.limit = *above;
    }
  } else {
    auto below = std::upper_bound(kept.begin(), kept.end(), gamma0);
    if (below == kept.begin()) {
      out.branch = LimitBranch::Diverges;
      out.limit = kInf;
    } else {
      out.branch = LimitBranch::LargestBelow;
      out.limit = *std::prev(below);
    }
  }
  return out;
}

template SigmaBar<Real> sigma_bar(const std::vector<double>&, double, const ProblemInstance<Real>&, Index);
template SigmaBar<Complex> sigma_bar(const std::vector<double>&, double, const ProblemInstance<Complex>&, Index);
template BlockLocalData block_local_data(const SigmaBar<Real>&, const ProblemInstance<Real>&, double);
template BlockLocalData block_local_data(const SigmaBar<Complex>&, const ProblemInstance<Complex>&, double);
template BlockLocalData local_data_from_complement(const Mat<Real>&, const Vec<Real>&, const Mat<Real>&, double,
                                                   double);
template BlockLocalData local_data_from_complement(const Mat<Complex>&, const Vec<Complex>&, const Mat<Complex>&,
                                                   double, double);

}  // namespace vbsbl
