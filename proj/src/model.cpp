#include "vbsbl/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace vbsbl {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonPositiveDefiniteBlockPrecision: return "NonPositiveDefiniteBlockPrecision";
    case ErrorCode::InvalidPrior: return "InvalidPrior";
    case ErrorCode::UnsupportedPrior: return "UnsupportedPrior";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::DegeneratePolynomial: return "DegeneratePolynomial";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::ZeroReference: return "ZeroReference";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

BlockStructure::BlockStructure(std::span<const Index> sizes) : sizes_(sizes.begin(), sizes.end()) {
  offsets_.reserve(sizes_.size());
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (sizes_[i] < 1) {
      throw Error(ErrorCode::DimensionMismatch,
                  "block " + std::to_string(i) + " has size " + std::to_string(sizes_[i]));
    }
    offsets_.push_back(dim_);
    dim_ += sizes_[i];
  }
}

BlockStructure BlockStructure::uniform(Index count, Index size) {
  std::vector<Index> sizes(static_cast<std::size_t>(count), size);
  return BlockStructure(sizes);
}

Index BlockStructure::dim_of(std::span<const Index> blocks) const {
  Index total = 0;
  for (Index b : blocks) total += size(b);
  return total;
}

namespace {

template <class Scalar>
bool is_hermitian(const Mat<Scalar>& B) {
  const double scale = std::max(1.0, B.cwiseAbs().maxCoeff());
  return (B - B.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

}  // namespace

template <class Scalar>
ProblemInstance<Scalar> validate_instance(InstanceData<Scalar> data) {
  const Index n = data.dictionary.rows();
  const Index m = data.dictionary.cols();
  if (n < 1 || m < 1) {
    throw Error(ErrorCode::DimensionMismatch, "dictionary must have at least one row and column");
  }
  if (data.y.size() != n) {
    std::ostringstream os;
    os << "observation length " << data.y.size() << " does not match dictionary rows " << n;
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  BlockStructure blocks(data.block_sizes);
  if (blocks.dim() != m) {
    std::ostringstream os;
    os << "block sizes sum to " << blocks.dim() << " but dictionary has " << m << " columns";
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  if (!data.precisions.empty() && static_cast<Index>(data.precisions.size()) != blocks.count()) {
    throw Error(ErrorCode::DimensionMismatch, "expected one precision matrix per block");
  }

  ProblemInstance<Scalar> inst;
  inst.blocks_ = blocks;
  inst.precisions_.reserve(static_cast<std::size_t>(blocks.count()));
  inst.factors_.reserve(static_cast<std::size_t>(blocks.count()));
  inst.logdets_.reserve(static_cast<std::size_t>(blocks.count()));
  for (Index i = 0; i < blocks.count(); ++i) {
    const Index d = blocks.size(i);
    Mat<Scalar> B = data.precisions.empty() ? Mat<Scalar>::Identity(d, d)
                                            : std::move(data.precisions[static_cast<std::size_t>(i)]);
    if (B.rows() != d || B.cols() != d) {
      std::ostringstream os;
      os << "precision of block " << i << " is " << B.rows() << "x" << B.cols() << ", expected " << d
         << "x" << d;
      throw Error(ErrorCode::DimensionMismatch, os.str());
    }
    if (!B.allFinite() || !is_hermitian(B)) {
      throw Error(ErrorCode::NonPositiveDefiniteBlockPrecision,
                  "precision of block " + std::to_string(i) + " is not Hermitian");
    }
    Eigen::LLT<Mat<Scalar>> llt(B);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::NonPositiveDefiniteBlockPrecision,
                  "precision of block " + std::to_string(i) + " is not positive definite");
    }
    Mat<Scalar> L = llt.matrixL();
    const auto diag = L.diagonal().real();
    if ((diag.array() <= 0.0).any()) {
      throw Error(ErrorCode::NonPositiveDefiniteBlockPrecision,
                  "precision of block " + std::to_string(i) + " is not positive definite");
    }
    inst.logdets_.push_back(2.0 * diag.array().log().sum());
    inst.factors_.push_back(std::move(L));
    inst.precisions_.push_back(std::move(B));
  }
  inst.y_ = std::move(data.y);
  inst.dictionary_ = std::move(data.dictionary);
  inst.y_norm2_ = inst.y_.squaredNorm();
  return inst;
}

template <class Scalar>
ProblemInstance<Scalar> mmv_to_block(const Mat<Scalar>& Y, const Mat<Scalar>& Psi,
                                     const Mat<Scalar>& row_precision) {
  const Index J = Y.cols();
  if (J < 1) throw Error(ErrorCode::DimensionMismatch, "need at least one measurement vector");
  if (Psi.rows() != Y.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "Psi and Y must have the same number of rows");
  }
  if (row_precision.rows() != J || row_precision.cols() != J) {
    throw Error(ErrorCode::DimensionMismatch, "row precision must be J x J");
  }
  const Index ns = Psi.rows();
  const Index kg = Psi.cols();

  InstanceData<Scalar> data;
  data.y.resize(ns * J);
  for (Index n = 0; n < ns; ++n) data.y.segment(n * J, J) = Y.row(n).transpose();
  data.dictionary = Mat<Scalar>::Zero(ns * J, kg * J);
  for (Index n = 0; n < ns; ++n) {
    for (Index k = 0; k < kg; ++k) {
      const Scalar v = Psi(n, k);
      if (v == Scalar(0)) continue;
      for (Index j = 0; j < J; ++j) data.dictionary(n * J + j, k * J + j) = v;
    }
  }
  data.block_sizes.assign(static_cast<std::size_t>(kg), J);
  data.precisions.assign(static_cast<std::size_t>(kg), row_precision);
  return validate_instance(std::move(data));
}

template <class Scalar>
Mat<Scalar> block_vector_to_rows(const Vec<Scalar>& x, Index block_count, Index block_size) {
  if (x.size() != block_count * block_size) {
    throw Error(ErrorCode::DimensionMismatch, "vector length must equal blocks * block size");
  }
  Mat<Scalar> X(block_count, block_size);
  for (Index k = 0; k < block_count; ++k) X.row(k) = x.segment(k * block_size, block_size).transpose();
  return X;
}

template ProblemInstance<Real> validate_instance(InstanceData<Real>);
template ProblemInstance<Complex> validate_instance(InstanceData<Complex>);
template ProblemInstance<Real> mmv_to_block(const Mat<Real>&, const Mat<Real>&, const Mat<Real>&);
template ProblemInstance<Complex> mmv_to_block(const Mat<Complex>&, const Mat<Complex>&,
                                               const Mat<Complex>&);
template Mat<Real> block_vector_to_rows(const Vec<Real>&, Index, Index);
template Mat<Complex> block_vector_to_rows(const Vec<Complex>&, Index, Index);

}  // namespace vbsbl
