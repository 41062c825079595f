#include "vbsbl/doa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vbsbl {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Complex complex_normal(std::mt19937_64& rng, double variance) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5 * variance));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

}  // namespace

ArrayGeometry uniform_linear_array(Index sensors, double spacing, double wavelength) {
  if (sensors < 1) throw Error(ErrorCode::InvalidArgument, "array needs at least one sensor");
  ArrayGeometry geom;
  geom.wavelength = wavelength;
  for (Index n = 0; n < sensors; ++n) geom.positions.push_back(spacing * static_cast<double>(n));
  validate_geometry(geom);
  return geom;
}

void validate_geometry(const ArrayGeometry& geom) {
  if (geom.positions.empty()) throw Error(ErrorCode::InvalidArgument, "array needs at least one sensor");
  if (geom.positions.front() != 0.0) throw Error(ErrorCode::InvalidArgument, "first sensor must sit at 0");
  if (!(geom.wavelength > 0.0)) throw Error(ErrorCode::InvalidArgument, "wavelength must be positive");
}

DoaGrid sin_regular_grid(Index points) {
  if (points < 1) throw Error(ErrorCode::InvalidArgument, "grid needs at least one point");
  DoaGrid grid;
  for (Index m = 0; m < points; ++m) {
    const double s = -1.0 + 2.0 * static_cast<double>(m) / static_cast<double>(points);
    grid.angles_deg.push_back(std::asin(s) / kDeg);
  }
  return grid;
}

void validate_grid(const DoaGrid& grid) {
  if (grid.angles_deg.empty()) throw Error(ErrorCode::InvalidArgument, "grid is empty");
  for (std::size_t k = 0; k < grid.angles_deg.size(); ++k) {
    const double a = grid.angles_deg[k];
    if (!(a >= -90.0 && a < 90.0)) throw Error(ErrorCode::InvalidArgument, "grid angle outside [-90, 90)");
    if (k > 0 && !(a > grid.angles_deg[k - 1])) throw Error(ErrorCode::InvalidArgument, "grid must increase");
  }
}

Index nearest_grid_index(const DoaGrid& grid, double theta_deg) {
  validate_grid(grid);
  Index best = 0;
  for (Index k = 1; k < grid.size(); ++k) {
    if (std::abs(grid.angles_deg[static_cast<std::size_t>(k)] - theta_deg) <
        std::abs(grid.angles_deg[static_cast<std::size_t>(best)] - theta_deg)) {
      best = k;
    }
  }
  return best;
}

Vec<Complex> steering_vector(const ArrayGeometry& geom, double theta_deg) {
  validate_geometry(geom);
  const Index n = geom.sensors();
  const double s = std::sin(theta_deg * kDeg);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Vec<Complex> out(n);
  for (Index k = 0; k < n; ++k) {
    const double phase = -2.0 * std::numbers::pi * geom.positions[static_cast<std::size_t>(k)] / geom.wavelength * s;
    out[k] = scale * Complex(std::cos(phase), std::sin(phase));
  }
  return out;
}

Mat<Complex> build_grid_dictionary(const ArrayGeometry& geom, const DoaGrid& grid) {
  validate_grid(grid);
  Mat<Complex> psi(geom.sensors(), grid.size());
  for (Index k = 0; k < grid.size(); ++k) psi.col(k) = steering_vector(geom, grid.angles_deg[static_cast<std::size_t>(k)]);
  return psi;
}

Mat<Complex> ar1_covariance(Complex beta, Index snapshots) {
  if (!(std::abs(beta) < 1.0)) throw Error(ErrorCode::InvalidArgument, "AR(1) coefficient needs |beta| < 1");
  if (snapshots < 1) throw Error(ErrorCode::InvalidArgument, "need at least one snapshot");
  std::vector<Complex> powers(static_cast<std::size_t>(snapshots), Complex(1.0));
  for (std::size_t k = 1; k < powers.size(); ++k) powers[k] = powers[k - 1] * beta;
  Mat<Complex> S(snapshots, snapshots);
  for (Index i = 0; i < snapshots; ++i) {
    for (Index j = 0; j <= i; ++j) {
      S(i, j) = powers[static_cast<std::size_t>(i - j)];
      S(j, i) = std::conj(S(i, j));
    }
  }
  return S;
}

DoaScenario simulate_sources(const SourceModel& model, const Mat<Complex>& psi, const DoaGrid& grid,
                             double array_snr_db, std::mt19937_64& rng) {
  if (psi.cols() != grid.size()) throw Error(ErrorCode::DimensionMismatch, "dictionary and grid differ in size");
  if (!(std::abs(model.beta) < 1.0)) throw Error(ErrorCode::InvalidArgument, "AR(1) coefficient needs |beta| < 1");
  if (model.snapshots < 1) throw Error(ErrorCode::InvalidArgument, "need at least one snapshot");
  const Index T = model.snapshots;

  DoaScenario out;
  for (double doa : model.doas_deg) out.support.push_back(nearest_grid_index(grid, doa));
  std::sort(out.support.begin(), out.support.end());
  out.support.erase(std::unique(out.support.begin(), out.support.end()), out.support.end());
  for (Index k : out.support) out.true_doas.push_back(grid.angles_deg[static_cast<std::size_t>(k)]);

  const double innovation = 1.0 - std::norm(model.beta);
  out.X = Mat<Complex>::Zero(grid.size(), T);
  for (Index k : out.support) {
    Complex s = complex_normal(rng, 1.0);
    out.X(k, 0) = s;
    for (Index t = 1; t < T; ++t) {
      s = model.beta * s + complex_normal(rng, innovation);
      out.X(k, t) = s;
    }
  }

  const Mat<Complex> clean = psi * out.X;
  const double mean_power = clean.colwise().squaredNorm().mean();
  out.lambda = std::pow(10.0, array_snr_db / 10.0) / mean_power;
  out.Y = clean;
  for (Index t = 0; t < T; ++t) {
    for (Index n = 0; n < psi.rows(); ++n) out.Y(n, t) += complex_normal(rng, 1.0 / out.lambda);
  }
  return out;
}

std::vector<double> extract_doas(const std::vector<Index>& active_blocks, const DoaGrid& grid) {
  std::vector<double> out;
  for (Index k : active_blocks) out.push_back(grid.angles_deg.at(static_cast<std::size_t>(k)));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> extract_doas(const PosteriorState<Complex>& state, const DoaGrid& grid) {
  return extract_doas(active_set(state.gamma), grid);
}

}  // namespace vbsbl
