#pragma once

#include <span>
#include <vector>

#include "vbsbl/core.hpp"

namespace vbsbl {

/// Partition of the weight vector into K contiguous blocks.
///
/// Block i occupies entries [offset(i), offset(i) + size(i)). The selection
/// matrices of the block model are never materialized; everything works on
/// these index ranges.
class BlockStructure {
 public:
  BlockStructure() = default;
  explicit BlockStructure(std::span<const Index> sizes);

  static BlockStructure uniform(Index count, Index size);

  Index count() const noexcept { return static_cast<Index>(sizes_.size()); }
  Index dim() const noexcept { return dim_; }
  Index size(Index i) const { return sizes_[static_cast<std::size_t>(i)]; }
  Index offset(Index i) const { return offsets_[static_cast<std::size_t>(i)]; }
  const std::vector<Index>& sizes() const noexcept { return sizes_; }
  const std::vector<Index>& offsets() const noexcept { return offsets_; }

  /// Total dimension of the listed blocks.
  Index dim_of(std::span<const Index> blocks) const;

 private:
  std::vector<Index> sizes_;
  std::vector<Index> offsets_;
  Index dim_ = 0;
};

/// Unvalidated inputs for a block-sparse regression problem y = Phi x + v.
/// An empty `precisions` list means B_i = I for every block.
template <class Scalar>
struct InstanceData {
  Vec<Scalar> y;
  Mat<Scalar> dictionary;
  std::vector<Index> block_sizes;
  std::vector<Mat<Scalar>> precisions;
};

template <class Scalar>
class ProblemInstance;

template <class Scalar>
ProblemInstance<Scalar> validate_instance(InstanceData<Scalar> data);

/// Validated, immutable problem. Holds the Cholesky factors L_i of the
/// intra-block precision matrices (L_i L_i^H = B_i).
template <class Scalar>
class ProblemInstance {
 public:
  using scalar_type = Scalar;

  const Vec<Scalar>& y() const noexcept { return y_; }
  const Mat<Scalar>& dictionary() const noexcept { return dictionary_; }
  const BlockStructure& blocks() const noexcept { return blocks_; }
  const Mat<Scalar>& precision(Index i) const { return precisions_[static_cast<std::size_t>(i)]; }
  const Mat<Scalar>& precision_factor(Index i) const { return factors_[static_cast<std::size_t>(i)]; }
  /// log det B_i
  double precision_logdet(Index i) const { return logdets_[static_cast<std::size_t>(i)]; }

  Index rows() const noexcept { return dictionary_.rows(); }
  Index cols() const noexcept { return dictionary_.cols(); }
  Index block_count() const noexcept { return blocks_.count(); }
  double rho() const noexcept { return rho_; }
  double y_norm2() const noexcept { return y_norm2_; }

  auto block_columns(Index i) const {
    return dictionary_.middleCols(blocks_.offset(i), blocks_.size(i));
  }

 private:
  friend ProblemInstance validate_instance<Scalar>(InstanceData<Scalar> data);
  ProblemInstance() = default;

  Vec<Scalar> y_;
  Mat<Scalar> dictionary_;
  BlockStructure blocks_;
  std::vector<Mat<Scalar>> precisions_;
  std::vector<Mat<Scalar>> factors_;
  std::vector<double> logdets_;
  double rho_ = field_rho<Scalar>;
  double y_norm2_ = 0.0;
};

/// Rearranges the row-sparse model Y = Psi X + V into the block model:
/// y = vec(Y^T), Phi = Psi (x) I_J, one block of size J per row of X.
template <class Scalar>
ProblemInstance<Scalar> mmv_to_block(const Mat<Scalar>& Y, const Mat<Scalar>& Psi,
                                     const Mat<Scalar>& row_precision);

/// Inverse of the vectorization used by mmv_to_block: row k of the result is block k.
template <class Scalar>
Mat<Scalar> block_vector_to_rows(const Vec<Scalar>& x, Index block_count, Index block_size);

}  // namespace vbsbl
