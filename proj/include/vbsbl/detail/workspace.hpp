#pragma once

#include <memory>
#include <vector>

#include "vbsbl/fastupdate.hpp"
#include "vbsbl/model.hpp"

namespace vbsbl::detail {

/// Gram blocks Phi^H Phi_j computed on first use. Diagonal blocks and Phi^H y
/// are precomputed since every block update needs them.
template <class Scalar>
class GramCache {
 public:
  explicit GramCache(const ProblemInstance<Scalar>& inst);

  const Mat<Scalar>& diag(Index i) const { return diag_[static_cast<std::size_t>(i)]; }
  const Vec<Scalar>& phi_y() const noexcept { return phi_y_; }
  /// Phi^H Phi_j, an M x d_j matrix.
  const Mat<Scalar>& column(Index j);
  /// Phi_rows^H Phi_cols; block lists ascending.
  Mat<Scalar> gather(const std::vector<Index>& rows, const std::vector<Index>& cols);
  Vec<Scalar> gather_phi_y(const std::vector<Index>& blocks) const;
  std::size_t cached_columns() const noexcept;

 private:
  const ProblemInstance<Scalar>* inst_;
  std::vector<Mat<Scalar>> diag_;
  Vec<Scalar> phi_y_;
  std::vector<std::unique_ptr<Mat<Scalar>>> columns_;
};

/// Cholesky factor of lambda G_SS + blockdiag(gamma_k B_k) over a block set S.
template <class Scalar>
class ActiveFactor {
 public:
  /// Throws SingularMatrix if the matrix is not numerically positive definite.
  void compute(GramCache<Scalar>& gram, const ProblemInstance<Scalar>& inst, std::vector<Index> blocks,
               const std::vector<double>& gamma, double lambda);

  const std::vector<Index>& blocks() const noexcept { return blocks_; }
  Index dim() const noexcept { return dim_; }
  bool empty() const noexcept { return blocks_.empty(); }
  const Eigen::LLT<Mat<Scalar>>& llt() const noexcept { return llt_; }
  /// log det of the factored matrix.
  double logdet() const;
  Mat<Scalar> inverse() const;

 private:
  std::vector<Index> blocks_;
  Index dim_ = 0;
  Eigen::LLT<Mat<Scalar>> llt_;
};

/// Local data of block i with `factor` covering the other active blocks.
template <class Scalar>
BlockLocalData schur_local_data(GramCache<Scalar>& gram, const ActiveFactor<Scalar>& factor,
                                const ProblemInstance<Scalar>& inst, Index i, double lambda);

}  // namespace vbsbl::detail
