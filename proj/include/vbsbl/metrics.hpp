#pragma once

#include <optional>
#include <vector>

#include "vbsbl/core.hpp"
#include "vbsbl/model.hpp"

namespace vbsbl {

struct TrialResult {
  double nmse = 0.0;
  double support_accuracy = 0.0;
  int iterations = 0;
  Index active_count = 0;
  double runtime_seconds = 0.0;
  std::optional<double> ospa;
};

/// ||x - x_hat||^2 / ||x||^2. Throws ZeroReference when x = 0.
template <class Scalar>
double nmse(const Vec<Scalar>& x_true, const Vec<Scalar>& x_hat);

/// Fraction of the K blocks classified correctly as zero or nonzero.
double support_accuracy(const std::vector<Index>& true_support, const std::vector<Index>& est_support, Index K);

/// 10 log10(lambda ||Phi x||^2 / N)
template <class Scalar>
double snr_db(const ProblemInstance<Scalar>& inst, const Vec<Scalar>& x_true, double lambda_true);

/// 10 log10(lambda ||Psi x_t||^2) for a single snapshot x_t.
double array_snr_db(const Mat<Complex>& psi, const Vec<Complex>& x_t, double lambda);

/// Minimum-cost assignment of rows to columns (rows <= cols). Entry r of the
/// result is the column assigned to row r.
std::vector<Index> optimal_assignment(const Eigen::MatrixXd& cost);

/// OSPA distance between two angle sets in degrees: clipped absolute
/// differences under the best matching, plus `cutoff` for every unmatched
/// element, normalized by the larger cardinality.
double ospa(const std::vector<double>& estimate, const std::vector<double>& truth, double cutoff = 5.0,
            double order = 1.0);

}  // namespace vbsbl
