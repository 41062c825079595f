#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "vbsbl/core.hpp"

namespace vbsbl {

// Matrix text format:
//
//   # comments and blank lines are ignored
//   vbsbl-matrix 1 <rows> <cols> real|complex
//   <row 0 entries separated by whitespace or commas>
//   ...
//
// Complex entries are written "re,im" and separated by whitespace. A file
// without the header line is read as real CSV with one row per line.
// Vectors are n x 1 matrices.

using AnyMatrix = std::variant<Mat<Real>, Mat<Complex>>;

AnyMatrix parse_matrix(std::istream& in, const std::string& source = "<stream>");
AnyMatrix read_matrix(const std::string& path);

/// Converts to the requested field. Throws ParseError for complex -> real.
template <class Scalar>
Mat<Scalar> as_field(const AnyMatrix& m);

template <class Scalar>
void write_matrix(std::ostream& out, const Mat<Scalar>& m);
template <class Scalar>
void write_matrix(const std::string& path, const Mat<Scalar>& m);

bool is_complex(const AnyMatrix& m) noexcept;

}  // namespace vbsbl
