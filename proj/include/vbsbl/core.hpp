#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace vbsbl {

using Real = double;
using Complex = std::complex<double>;
using Index = Eigen::Index;

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
inline constexpr bool is_complex_v = false;
template <>
inline constexpr bool is_complex_v<Complex> = true;

/// Exponent scale of the Gaussian density: 1/2 for real data, 1 for complex.
template <class Scalar>
inline constexpr double field_rho = is_complex_v<Scalar> ? 1.0 : 0.5;

enum class ErrorCode {
  DimensionMismatch,
  NonPositiveDefiniteBlockPrecision,
  InvalidPrior,
  UnsupportedPrior,
  SingularMatrix,
  EigenFailure,
  DegeneratePolynomial,
  RankDeficient,
  ZeroReference,
  InvalidArgument,
  ParseError,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vbsbl
