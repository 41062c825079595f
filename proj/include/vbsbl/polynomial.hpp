#pragma once

#include <vector>

#include "vbsbl/core.hpp"

namespace vbsbl {

/// Real polynomial, coefficient k multiplies gamma^k.
using Poly = std::vector<double>;

double poly_eval(const Poly& p, double x);
Poly poly_mul(const Poly& a, const Poly& b);
/// a + scale * b
Poly poly_axpy(const Poly& a, double scale, const Poly& b);
/// Multiplies by x^k.
Poly poly_shift(const Poly& p, std::size_t k);
/// Drops trailing coefficients that are exactly zero.
void poly_trim(Poly& p);

/// Positive real roots of p, ascending.
///
/// Roots come from the eigenvalues of the balanced companion matrix of p after
/// rescaling the variable so that the constant and leading coefficients have
/// equal magnitude. A root r is kept when |Im r| <= tol_im (1 + |Re r|) and
/// Re r > 0; it is then refined by Newton steps on p and merged with any
/// neighbour closer than 1e-8 relative.
///
/// Throws DegeneratePolynomial when every coefficient is below 1e-300.
std::vector<double> positive_real_roots(const Poly& p, double tol_im = 1e-8);

}  // namespace vbsbl
