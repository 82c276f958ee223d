#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "nbt/error.hpp"
#include "nbt/linalg.hpp"

namespace nbt {

struct ModelParams {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double gamma = 0.0;
};

enum class Boundary { Open, Periodic };

using Block2 = Eigen::Matrix2cd;

inline bool finite(const ModelParams& p) {
  return std::isfinite(p.t1) && std::isfinite(p.t2) && std::isfinite(p.t3) && std::isfinite(p.gamma);
}

// R+(β) = (t1+γ) + t2/β + t3 β,  R-(β) = (t1-γ) + t3/β + t2 β
inline cplx r_plus(const ModelParams& p, cplx beta) {
  return (p.t1 + p.gamma) + p.t2 / beta + p.t3 * beta;
}
inline cplx r_minus(const ModelParams& p, cplx beta) {
  return (p.t1 - p.gamma) + p.t3 / beta + p.t2 * beta;
}

inline Block2 offdiag_block(cplx ab, cplx ba) {
  Block2 h;
  h << cplx{}, ab, ba, cplx{};
  return h;
}

inline Block2 bloch_hamiltonian(const ModelParams& p, double k) {
  const cplx em = std::polar(1.0, -k), ep = std::polar(1.0, k);
  return offdiag_block((p.t1 + p.gamma) + p.t2 * em + p.t3 * ep,
                       (p.t1 - p.gamma) + p.t3 * em + p.t2 * ep);
}

inline Block2 nonbloch_hamiltonian(const ModelParams& p, cplx beta) {
  if (beta == cplx{}) throw Error(ErrorCode::Domain, "nonbloch_hamiltonian: beta = 0");
  return offdiag_block(r_plus(p, beta), r_minus(p, beta));
}

// Coefficients c0..c4 of β²(E² - R+R-), lowest order first.
inline std::array<cplx, 5> characteristic_polynomial(const ModelParams& p, cplx E) {
  const double a = p.t1 + p.gamma, b = p.t1 - p.gamma;
  return {cplx(-p.t2 * p.t3),
          cplx(-(a * p.t3 + b * p.t2)),
          E * E - (p.t3 * p.t3 + a * b + p.t2 * p.t2),
          cplx(-(p.t3 * b + a * p.t2)),
          cplx(-p.t2 * p.t3)};
}

inline CMatrix real_space_hamiltonian(const ModelParams& p, int L, Boundary bc) {
  if (L < 4) throw Error(ErrorCode::Size, "real_space_hamiltonian: L < 4");
  CMatrix h = CMatrix::Zero(2 * L, 2 * L);
  for (int n = 0; n < L; ++n) {
    const int a = 2 * n, b = 2 * n + 1;
    h(a, b) += p.t1 + p.gamma;
    h(b, a) += p.t1 - p.gamma;
    if (n + 1 < L || bc == Boundary::Periodic) {
      const int m = (n + 1) % L;
      const int a1 = 2 * m, b1 = 2 * m + 1;
      h(b, a1) += p.t2;
      h(a1, b) += p.t2;
      h(a, b1) += p.t3;
      h(b1, a) += p.t3;
    }
  }
  return h;
}

// Winding of det[H(k) - E_ref] = E_ref² - R+R- over k ∈ [0, 2π).
inline int spectral_winding(const ModelParams& p, cplx e_ref, int nk = 4096) {
  if (nk < 3) throw Error(ErrorCode::Size, "spectral_winding: grid too small");
  auto det = [&](int j) {
    const cplx beta = std::polar(1.0, 2.0 * std::numbers::pi * j / nk);
    return e_ref * e_ref - r_plus(p, beta) * r_minus(p, beta);
  };
  double acc = 0.0;
  cplx prev = det(0);
  if (std::abs(prev) < 1e-10) throw Error(ErrorCode::SingularReference, "det vanishes on grid");
  for (int j = 1; j <= nk; ++j) {
    const cplx cur = det(j % nk);
    if (std::abs(cur) < 1e-10) throw Error(ErrorCode::SingularReference, "det vanishes on grid");
    acc += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(acc / (2.0 * std::numbers::pi)));
}

}  // namespace nbt
