#include "vbsbl/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/Polynomials>

namespace vbsbl {

double poly_eval(const Poly& p, double x) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Poly poly_axpy(const Poly& a, double scale, const Poly& b) {
  Poly out(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += scale * b[i];
  return out;
}

Poly poly_shift(const Poly& p, std::size_t k) {
  Poly out(k, 0.0);
  out.insert(out.end(), p.begin(), p.end());
  return out;
}

void poly_trim(Poly& p) {
  while (!p.empty() && p.back() == 0.0) p.pop_back();
}

namespace {

double newton_polish(const Poly& p, const Poly& dp, double r) {
  double value = std::abs(poly_eval(p, r));
  for (int k = 0; k < 8 && value > 0.0; ++k) {
    const double slope = poly_eval(dp, r);
    if (slope == 0.0 || !std::isfinite(slope)) break;
    const double next = r - poly_eval(p, r) / slope;
    if (!(next > 0.0) || !std::isfinite(next)) break;
    const double next_value = std::abs(poly_eval(p, next));
    if (!(next_value < value)) break;
    r = next;
    value = next_value;
  }
  return r;
}

}  // namespace

std::vector<double> positive_real_roots(const Poly& input, double tol_im) {
  Poly p = input;
  while (!p.empty() && std::abs(p.back()) < 1e-300) p.pop_back();
  if (p.empty()) throw Error(ErrorCode::DegeneratePolynomial, "all coefficients vanish");

  // Roots at zero are not positive; divide them out.
  std::size_t low = 0;
  while (std::abs(p[low]) < 1e-300) ++low;
  p.erase(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(low));
  const std::size_t degree = p.size() - 1;
  if (degree == 0) return {};

  std::vector<double> candidates;
  if (degree == 1) {
    candidates.push_back(-p[0] / p[1]);
  } else {
    const double sigma = std::pow(std::abs(p[0] / p[degree]), 1.0 / static_cast<double>(degree));
    Eigen::VectorXd scaled(static_cast<Index>(degree + 1));
    double power = 1.0;
    for (std::size_t k = 0; k <= degree; ++k) {
      scaled[static_cast<Index>(k)] = p[k] * power;
      power *= sigma;
    }
    scaled /= scaled.cwiseAbs().maxCoeff();
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
    solver.compute(scaled);
    for (const auto& z : solver.roots()) {
      const double re = z.real() * sigma;
      const double im = z.imag() * sigma;
      if (re > 0.0 && std::abs(im) <= tol_im * (1.0 + std::abs(re))) candidates.push_back(re);
    }
  }

  Poly dp(degree);
  for (std::size_t k = 1; k <= degree; ++k) dp[k - 1] = static_cast<double>(k) * p[k];
  std::vector<double> roots;
  for (double r : candidates) {
    if (!(r > 0.0) || !std::isfinite(r)) continue;
    roots.push_back(newton_polish(p, dp, r));
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> merged;
  for (double r : roots) {
    if (!merged.empty() && std::abs(r - merged.back()) <= 1e-8 * std::max(r, merged.back())) continue;
    merged.push_back(r);
  }
  return merged;
}

}  // namespace vbsbl
