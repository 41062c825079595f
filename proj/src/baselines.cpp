#include "vbsbl/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace vbsbl {

template <class Scalar>
Vec<Scalar> oracle_mmse(const ProblemInstance<Scalar>& inst, const std::vector<Index>& support) {
  std::vector<Index> blocks = support;
  std::sort(blocks.begin(), blocks.end());
  blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
  Vec<Scalar> x = Vec<Scalar>::Zero(inst.cols());
  if (blocks.empty()) return x;
  for (Index k : blocks) {
    if (k < 0 || k >= inst.block_count()) throw Error(ErrorCode::InvalidArgument, "support index out of range");
  }

  Mat<Scalar> phi(inst.rows(), inst.blocks().dim_of(blocks));
  Index c = 0;
  for (Index k : blocks) {
    phi.middleCols(c, inst.blocks().size(k)) = inst.block_columns(k);
    c += inst.blocks().size(k);
  }
  Eigen::ColPivHouseholderQR<Mat<Scalar>> qr(phi);
  if (qr.rank() < phi.cols()) {
    throw Error(ErrorCode::RankDeficient, "support columns are rank deficient");
  }
  const Vec<Scalar> xs = qr.solve(inst.y());
  c = 0;
  for (Index k : blocks) {
    const Index dk = inst.blocks().size(k);
    x.segment(inst.blocks().offset(k), dk) = xs.segment(c, dk);
    c += dk;
  }
  return x;
}

template <class Scalar>
Vec<Scalar> hard_threshold_reference(const Vec<Scalar>& y, Index d) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "block size must be positive");
  if (y.norm() / std::sqrt(static_cast<double>(d)) > 1.0) return y;
  return Vec<Scalar>::Zero(y.size());
}

template Vec<Real> oracle_mmse(const ProblemInstance<Real>&, const std::vector<Index>&);
template Vec<Complex> oracle_mmse(const ProblemInstance<Complex>&, const std::vector<Index>&);
template Vec<Real> hard_threshold_reference(const Vec<Real>&, Index);
template Vec<Complex> hard_threshold_reference(const Vec<Complex>&, Index);

}  // namespace vbsbl
