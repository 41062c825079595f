#pragma once

#include <random>
#include <vector>

#include "vbsbl/core.hpp"
#include "vbsbl/inference.hpp"

namespace vbsbl {

/// Linear array. positions[n] is the distance from sensor 0 to sensor n, in
/// the same unit as the wavelength.
struct ArrayGeometry {
  std::vector<double> positions;
  double wavelength = 1.0;

  Index sensors() const noexcept { return static_cast<Index>(positions.size()); }
};

/// N sensors spaced `spacing` apart.
ArrayGeometry uniform_linear_array(Index sensors, double spacing = 0.5, double wavelength = 1.0);
void validate_geometry(const ArrayGeometry& geom);

/// Candidate directions in degrees, strictly increasing inside [-90, 90).
struct DoaGrid {
  std::vector<double> angles_deg;

  Index size() const noexcept { return static_cast<Index>(angles_deg.size()); }
};

/// M points with sin(theta_m) = -1 + 2m/M.
DoaGrid sin_regular_grid(Index points);
void validate_grid(const DoaGrid& grid);

/// Index of the grid angle closest to theta (in degrees).
Index nearest_grid_index(const DoaGrid& grid, double theta_deg);

/// (1/sqrt(N)) exp(-j 2 pi p_n / mu sin(theta)), theta in degrees.
Vec<Complex> steering_vector(const ArrayGeometry& geom, double theta_deg);
Mat<Complex> build_grid_dictionary(const ArrayGeometry& geom, const DoaGrid& grid);

struct SourceModel {
  std::vector<double> doas_deg{-2.0, 3.0, 50.0};
  Complex beta{0.0, 0.0};
  Index snapshots = 10;
};

/// Hermitian Toeplitz covariance of a stationary AR(1) sequence with unit
/// variance: entry (t, t - k) is beta^k.
Mat<Complex> ar1_covariance(Complex beta, Index snapshots);

struct DoaScenario {
  Mat<Complex> Y;               // sensors x snapshots
  Mat<Complex> X;               // grid x snapshots, row-sparse
  std::vector<Index> support;   // grid indices of the sources, ascending
  std::vector<double> true_doas;  // snapped to the grid, ascending
  double lambda = 1.0;          // noise precision used
};

/// Draws source amplitudes from a unit-variance AR(1) process started in its
/// stationary distribution and adds white complex Gaussian noise whose
/// precision makes the mean per-snapshot lambda ||Psi x_t||^2 equal the
/// requested array SNR.
DoaScenario simulate_sources(const SourceModel& model, const Mat<Complex>& psi, const DoaGrid& grid,
                             double array_snr_db, std::mt19937_64& rng);

/// Grid angles of the active blocks, ascending.
std::vector<double> extract_doas(const std::vector<Index>& active_blocks, const DoaGrid& grid);
std::vector<double> extract_doas(const PosteriorState<Complex>& state, const DoaGrid& grid);

}  // namespace vbsbl
