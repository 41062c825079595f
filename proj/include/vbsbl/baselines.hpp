#pragma once

#include <vector>

#include "vbsbl/core.hpp"
#include "vbsbl/model.hpp"

namespace vbsbl {

/// Least-squares fit of y on the columns of the given blocks, zeros elsewhere.
/// Throws RankDeficient if those columns do not have full column rank.
template <class Scalar>
Vec<Scalar> oracle_mmse(const ProblemInstance<Scalar>& inst, const std::vector<Index>& support);

/// Keeps y when ||y|| / sqrt(d) > 1, returns zero otherwise.
template <class Scalar>
Vec<Scalar> hard_threshold_reference(const Vec<Scalar>& y, Index d);

}  // namespace vbsbl
