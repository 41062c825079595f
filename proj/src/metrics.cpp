#include "vbsbl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vbsbl {

template <class Scalar>
double nmse(const Vec<Scalar>& x_true, const Vec<Scalar>& x_hat) {
  if (x_true.size() != x_hat.size()) throw Error(ErrorCode::DimensionMismatch, "nmse needs equal lengths");
  const double ref = x_true.squaredNorm();
  if (ref == 0.0) throw Error(ErrorCode::ZeroReference, "reference vector is zero");
  return (x_true - x_hat).squaredNorm() / ref;
}

double support_accuracy(const std::vector<Index>& true_support, const std::vector<Index>& est_support, Index K) {
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "need at least one block");
  std::vector<char> truth(static_cast<std::size_t>(K), 0), est(static_cast<std::size_t>(K), 0);
  for (Index k : true_support) truth.at(static_cast<std::size_t>(k)) = 1;
  for (Index k : est_support) est.at(static_cast<std::size_t>(k)) = 1;
  Index correct = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) correct += truth[k] == est[k] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(K);
}

template <class Scalar>
double snr_db(const ProblemInstance<Scalar>& inst, const Vec<Scalar>& x_true, double lambda_true) {
  const double power = (inst.dictionary() * x_true).squaredNorm();
  return 10.0 * std::log10(lambda_true * power / static_cast<double>(inst.rows()));
}

double array_snr_db(const Mat<Complex>& psi, const Vec<Complex>& x_t, double lambda) {
  return 10.0 * std::log10(lambda * (psi * x_t).squaredNorm());
}

// Shortest augmenting path Hungarian method with row and column potentials.
std::vector<Index> optimal_assignment(const Eigen::MatrixXd& cost) {
  const Index n = cost.rows();
  const Index m = cost.cols();
  if (n > m) throw Error(ErrorCode::InvalidArgument, "assignment needs rows <= cols");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(m + 1), 0.0);
  std::vector<Index> p(static_cast<std::size_t>(m + 1), 0), way(static_cast<std::size_t>(m + 1), 0);
  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(m + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(m + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Index i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= m; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (used[uj]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[uj];
        if (cur < minv[uj]) {
          minv[uj] = cur;
          way[uj] = j0;
        }
        if (minv[uj] < delta) {
          delta = minv[uj];
          j1 = j;
        }
      }
      for (Index j = 0; j <= m; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (used[uj]) {
          u[static_cast<std::size_t>(p[uj])] += delta;
          v[uj] -= delta;
        } else {
          minv[uj] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> assignment(static_cast<std::size_t>(n), -1);
  for (Index j = 1; j <= m; ++j) {
    if (p[static_cast<std::size_t>(j)] != 0) assignment[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  }
  return assignment;
}

double ospa(const std::vector<double>& estimate, const std::vector<double>& truth, double cutoff, double order) {
  if (!(cutoff > 0.0)) throw Error(ErrorCode::InvalidArgument, "OSPA cutoff must be positive");
  if (!(order >= 1.0)) throw Error(ErrorCode::InvalidArgument, "OSPA order must be >= 1");
  const std::vector<double>& small = estimate.size() <= truth.size() ? estimate : truth;
  const std::vector<double>& large = estimate.size() <= truth.size() ? truth : estimate;
  const auto m = static_cast<Index>(small.size());
  const auto n = static_cast<Index>(large.size());
  if (n == 0) return 0.0;

  Eigen::MatrixXd cost(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double dist = std::min(std::abs(small[static_cast<std::size_t>(i)] - large[static_cast<std::size_t>(j)]), cutoff);
      cost(i, j) = std::pow(dist, order);
    }
  }
  double total = std::pow(cutoff, order) * static_cast<double>(n - m);
  if (m > 0) {
    const auto assignment = optimal_assignment(cost);
    for (Index i = 0; i < m; ++i) total += cost(i, assignment[static_cast<std::size_t>(i)]);
  }
  return std::pow(total / static_cast<double>(n), 1.0 / order);
}

template double nmse(const Vec<Real>&, const Vec<Real>&);
template double nmse(const Vec<Complex>&, const Vec<Complex>&);
template double snr_db(const ProblemInstance<Real>&, const Vec<Real>&, double);
template double snr_db(const ProblemInstance<Complex>&, const Vec<Complex>&, double);

}  // namespace vbsbl
