#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "nbt/error.hpp"
#include "nbt/linalg.hpp"

namespace nbt {

namespace detail {

inline cplx horner(std::span<const cplx> c, cplx x) {
  cplx v{};
  for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

inline cplx horner_deriv(std::span<const cplx> c, cplx x) {
  cplx v{};
  for (std::size_t i = c.size(); i-- > 1;) v = v * x + static_cast<double>(i) * c[i];
  return v;
}

// Trim coefficients to the nonzero window [lo, hi]; zero roots are dropped.
inline std::vector<cplx> trim(std::span<const cplx> c) {
  double scale = 0.0;
  for (auto v : c) scale = std::max(scale, std::abs(v));
  const double eps = 1e-14 * scale;
  std::size_t lo = 0, hi = c.size();
  while (hi > 0 && std::abs(c[hi - 1]) <= eps) --hi;
  while (lo < hi && std::abs(c[lo]) <= eps) ++lo;
  return {c.begin() + lo, c.begin() + hi};
}

}  // namespace detail

// Roots of Σ c_i x^i (lowest order first). Zero roots are not reported.
inline std::vector<cplx> polynomial_roots(std::span<const cplx> coeffs) {
  const auto c = detail::trim(coeffs);
  if (c.size() < 2) throw Error(ErrorCode::DegeneratePolynomial, "no nonzero coefficient beyond the constant term");
  const int deg = static_cast<int>(c.size()) - 1;
  std::vector<cplx> roots;
  if (deg == 1) {
    roots.push_back(-c[0] / c[1]);
    return roots;
  }
  CMatrix comp = CMatrix::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
  Eigen::ComplexEigenSolver<CMatrix> es(comp, false);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::Solver, "companion eigensolve failed");
  roots.assign(es.eigenvalues().data(), es.eigenvalues().data() + deg);
  for (auto& r : roots) {
    for (int it = 0; it < 3; ++it) {
      const cplx d = detail::horner_deriv(c, r);
      if (std::abs(d) == 0.0) break;
      const cplx step = detail::horner(c, r) / d;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      const cplx cand = r - step;
      if (std::abs(detail::horner(c, cand)) < std::abs(detail::horner(c, r))) r = cand;
      else break;
    }
  }
  return roots;
}

inline std::vector<cplx> polynomial_roots(std::initializer_list<cplx> coeffs) {
  return polynomial_roots(std::span<const cplx>(coeffs.begin(), coeffs.size()));
}

inline void sort_by_modulus(std::vector<cplx>& v) {
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
}

}  // namespace nbt
