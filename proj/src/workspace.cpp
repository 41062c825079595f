#include "vbsbl/detail/workspace.hpp"

#include <algorithm>

namespace vbsbl::detail {

template <class Scalar>
GramCache<Scalar>::GramCache(const ProblemInstance<Scalar>& inst) : inst_(&inst) {
  const Index K = inst.block_count();
  diag_.reserve(static_cast<std::size_t>(K));
  for (Index i = 0; i < K; ++i) {
    const auto cols = inst.block_columns(i);
    diag_.push_back(cols.adjoint() * cols);
  }
  phi_y_ = inst.dictionary().adjoint() * inst.y();
  columns_.resize(static_cast<std::size_t>(K));
}

template <class Scalar>
const Mat<Scalar>& GramCache<Scalar>::column(Index j) {
  auto& slot = columns_[static_cast<std::size_t>(j)];
  if (!slot) slot = std::make_unique<Mat<Scalar>>(inst_->dictionary().adjoint() * inst_->block_columns(j));
  return *slot;
}

template <class Scalar>
Mat<Scalar> GramCache<Scalar>::gather(const std::vector<Index>& rows, const std::vector<Index>& cols) {
  const auto& blocks = inst_->blocks();
  Mat<Scalar> out(blocks.dim_of(rows), blocks.dim_of(cols));
  // An uncached column j whose row blocks are all cached is read off the
  // cached columns by Hermitian symmetry, so inactive blocks never trigger
  // an M x d product.
  auto cached = [&](Index k) { return columns_[static_cast<std::size_t>(k)] != nullptr; };
  const bool rows_cached = std::all_of(rows.begin(), rows.end(), cached);
  Index c = 0;
  for (Index j : cols) {
    const Index dj = blocks.size(j);
    const bool mirror = !cached(j) && rows_cached;
    Index r = 0;
    for (Index k : rows) {
      const Index dk = blocks.size(k);
      if (mirror) {
        out.block(r, c, dk, dj) = column(k).middleRows(blocks.offset(j), dj).adjoint();
      } else {
        out.block(r, c, dk, dj) = column(j).middleRows(blocks.offset(k), dk);
      }
      r += dk;
    }
    c += dj;
  }
  return out;
}

template <class Scalar>
Vec<Scalar> GramCache<Scalar>::gather_phi_y(const std::vector<Index>& list) const {
  const auto& blocks = inst_->blocks();
  Vec<Scalar> out(blocks.dim_of(list));
  Index r = 0;
  for (Index k : list) {
    out.segment(r, blocks.size(k)) = phi_y_.segment(blocks.offset(k), blocks.size(k));
    r += blocks.size(k);
  }
  return out;
}

template <class Scalar>
std::size_t GramCache<Scalar>::cached_columns() const noexcept {
  std::size_t n = 0;
  for (const auto& c : columns_) n += c ? 1 : 0;
  return n;
}

template <class Scalar>
void ActiveFactor<Scalar>::compute(GramCache<Scalar>& gram, const ProblemInstance<Scalar>& inst,
                                   std::vector<Index> blocks, const std::vector<double>& gamma, double lambda) {
  blocks_ = std::move(blocks);
  dim_ = inst.blocks().dim_of(blocks_);
  if (blocks_.empty()) {
    llt_ = Eigen::LLT<Mat<Scalar>>();
    return;
  }
  Mat<Scalar> M = lambda * gram.gather(blocks_, blocks_);
  Index r = 0;
  for (Index k : blocks_) {
    const Index dk = inst.blocks().size(k);
    M.block(r, r, dk, dk) += gamma[static_cast<std::size_t>(k)] * inst.precision(k);
    r += dk;
  }
  llt_.compute(M);
  if (llt_.info() != Eigen::Success || !(llt_.matrixLLT().diagonal().real().array() > 0.0).all()) {
    throw Error(ErrorCode::SingularMatrix, "posterior precision on the active set is not positive definite");
  }
}

template <class Scalar>
double ActiveFactor<Scalar>::logdet() const {
  if (blocks_.empty()) return 0.0;
  return 2.0 * llt_.matrixLLT().diagonal().real().array().log().sum();
}

template <class Scalar>
Mat<Scalar> ActiveFactor<Scalar>::inverse() const {
  if (blocks_.empty()) return Mat<Scalar>(0, 0);
  return llt_.solve(Mat<Scalar>::Identity(dim_, dim_));
}

template <class Scalar>
BlockLocalData schur_local_data(GramCache<Scalar>& gram, const ActiveFactor<Scalar>& factor,
                                const ProblemInstance<Scalar>& inst, Index i, double lambda) {
  const Index d = inst.blocks().size(i);
  Mat<Scalar> C = lambda * gram.diag(i);
  Vec<Scalar> r = gram.phi_y().segment(inst.blocks().offset(i), d);
  if (!factor.empty()) {
    const Mat<Scalar> G_Si = gram.gather(factor.blocks(), {i});
    const auto L = factor.llt().matrixL();
    const Mat<Scalar> X = L.solve(G_Si);
    const Vec<Scalar> z = L.solve(gram.gather_phi_y(factor.blocks()));
    C.noalias() -= (lambda * lambda) * (X.adjoint() * X);
    r.noalias() -= lambda * (X.adjoint() * z);
  }
  return local_data_from_complement<Scalar>(C, r, inst.precision_factor(i), lambda, inst.rho());
}

template class GramCache<Real>;
template class GramCache<Complex>;
template class ActiveFactor<Real>;
template class ActiveFactor<Complex>;
template BlockLocalData schur_local_data(GramCache<Real>&, const ActiveFactor<Real>&, const ProblemInstance<Real>&,
                                         Index, double);
template BlockLocalData schur_local_data(GramCache<Complex>&, const ActiveFactor<Complex>&,
                                         const ProblemInstance<Complex>&, Index, double);

}  // namespace vbsbl::detail
