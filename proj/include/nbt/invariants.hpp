#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "nbt/gbz.hpp"
#include "nbt/spectra.hpp"

namespace nbt {

struct BandState {
  cplx energy;
  Eigen::Vector2cd right;
  Eigen::RowVector2cd left;  // left * right == 1
};

struct WilsonLoopResult {
  double p_beta = 0.0;
  double w_norm = 0.0;
  int n_points = 0;
  cplx w{};
};

struct WilsonOptions {
  int subdivision = 16;
  bool richardson = true;
};

inline double wrap01(double x) {
  x -= std::floor(x);
  if (x >= 1.0 - 1e-9) x = 0.0;
  return x;
}

inline double circle_distance(double a, double b) {
  const double d = std::abs(a - b);
  return std::min({d, std::abs(d - 1.0), std::abs(d + 1.0)});
}

inline std::vector<BandState> band_candidates(const ModelParams& p, cplx beta) {
  const cplx rp = r_plus(p, beta), rm = r_minus(p, beta);
  const cplx e = std::sqrt(rp * rm);
  std::vector<BandState> out;
  for (cplx en : {e, -e}) {
    BandState s;
    s.energy = en;
    if (std::abs(rp) >= std::abs(rm)) s.right << rp, en;
    else s.right << en, rm;
    if (std::abs(rm) >= std::abs(rp)) s.left << rm, en;
    else s.left << en, rp;
    const cplx ov = s.left * s.right;
    if (std::abs(ov) < 1e-300 || !std::isfinite(std::abs(s.left.norm() / ov)))
      throw Error(ErrorCode::EPOnContour, "defective H(beta) on the contour");
    s.left /= ov;
    out.push_back(s);
  }
  return out;
}

// Occupied band along a closed loop by maximal-overlap continuation.
inline std::vector<BandState> track_band(const ModelParams& p, const std::vector<cplx>& loop) {
  std::vector<BandState> band;
  band.reserve(loop.size());
  for (std::size_t j = 0; j < loop.size(); ++j) {
    auto c = band_candidates(p, loop[j]);
    if (j == 0) {
      const bool first = c[0].energy.real() < c[1].energy.real() ||
                         (c[0].energy.real() == c[1].energy.real() && c[0].energy.imag() <= c[1].energy.imag());
      band.push_back(first ? c[0] : c[1]);
      continue;
    }
    const auto& prev = band.back();
    double score[2];
    for (int k = 0; k < 2; ++k)
      score[k] = std::abs(cplx(prev.left * c[k].right)) * std::abs(cplx(c[k].left * prev.right));
    band.push_back(score[0] >= score[1] ? c[0] : c[1]);
  }
  return band;
}

inline cplx wilson_product(const std::vector<BandState>& band) {
  cplx w = 1.0;
  const std::size_t n = band.size();
  for (std::size_t j = 0; j < n; ++j) {
    const cplx link = band[j].left * band[(j + 1) % n].right;
    if (std::abs(link) < 1e-12) throw Error(ErrorCode::EPOnContour, "vanishing link overlap");
    w *= link;
  }
  return w;
}

// Linear subdivision of a closed contour in (arg β, log|β|).
inline std::vector<cplx> subdivide_loop(const std::vector<cplx>& pts, int factor) {
  if (factor <= 1) return pts;
  std::vector<cplx> out;
  out.reserve(pts.size() * factor);
  const std::size_t n = pts.size();
  for (std::size_t j = 0; j < n; ++j) {
    const cplx a = pts[j], b = pts[(j + 1) % n];
    double ta = std::arg(a), tb = std::arg(b);
    double dt = std::remainder(tb - ta, 2.0 * std::numbers::pi);
    const double la = std::log(std::abs(a)), lb = std::log(std::abs(b));
    for (int s = 0; s < factor; ++s) {
      const double u = static_cast<double>(s) / factor;
      out.push_back(std::polar(std::exp(la + u * (lb - la)), ta + u * dt));
    }
  }
  return out;
}

inline WilsonLoopResult wilson_loop(const ModelParams& p, const std::vector<cplx>& pts, const WilsonOptions& o = {}) {
  if (pts.size() < 3) throw Error(ErrorCode::Size, "wilson loop needs at least 3 points");
  WilsonLoopResult r;
  const int sub = std::max(1, o.subdivision);
  const cplx w1 = wilson_product(track_band(p, subdivide_loop(pts, sub)));
  if (o.richardson) {
    const cplx w2 = wilson_product(track_band(p, subdivide_loop(pts, 2 * sub)));
    r.w = w2;
    r.w_norm = std::norm(w2) / std::abs(w1);
    r.n_points = static_cast<int>(pts.size()) * 2 * sub;
  } else {
    r.w = w1;
    r.w_norm = std::abs(w1);
    r.n_points = static_cast<int>(pts.size()) * sub;
  }
  r.p_beta = wrap01(std::arg(r.w) / (2.0 * std::numbers::pi));
  return r;
}

inline WilsonLoopResult nonbloch_polarization(const GBZContour& c, const ModelParams& p, const WilsonOptions& o = {}) {
  return wilson_loop(p, c.points, o);
}

inline WilsonLoopResult bloch_polarization(const ModelParams& p, int nk = 720, const WilsonOptions& o = {}) {
  std::vector<cplx> pts(nk);
  for (int j = 0; j < nk; ++j) pts[j] = std::polar(1.0, 2.0 * std::numbers::pi * j / nk);
  return wilson_loop(p, pts, o);
}

struct ChiResult {
  double chi = 0.0;
  double imag_residue = 0.0;
};

// χ = Σ_λ N_L(λ) ξ_λ mod 1 over the degeneracy classes of the report.
inline ChiResult entanglement_polarization(const EntanglementReport& r) {
  if (!r.grouping_resolved) throw Error(ErrorCode::AmbiguousLocalization, "could not resolve degenerate classes");
  cplx sum{};
  for (const auto& g : r.groups) {
    if (!g.bulk && std::abs(g.n_left_raw - g.n_left) > 0.1)
      throw Error(ErrorCode::AmbiguousLocalization, "non-integer left occupation " + std::to_string(g.n_left_raw));
    sum += static_cast<double>(g.n_left) * (g.xi - std::round(g.xi.real()));
  }
  if (std::abs(sum.imag()) >= 1e-6) throw Error(ErrorCode::PairingViolation, "imaginary residue in chi");
  return {wrap01(sum.real()), sum.imag()};
}

inline ChiResult entanglement_polarization(EntanglementReport r, const std::vector<bool>& left_mask,
                                           const SpectrumOptions& o = {}) {
  r.left_weight = left_weights(r.right, r.left_rows, left_mask);
  group_modes(r, o);
  return entanglement_polarization(r);
}

struct RestaResult {
  double raw = 0.0;
  double corrected = 0.0;
  bool offset_defined = false;
  double det_norm = 0.0;
  bool well_defined = false;
};

inline RestaResult resta_polarization(const BiorthogonalEigensystem& sys, int L) {
  check_half_filling(sys);
  if (sys.size() != 2 * L) throw Error(ErrorCode::Size, "resta: system size mismatch");
  const auto occ = occupied_indices(sys);
  CMatrix dr = sys.right(Eigen::all, occ);
  for (int s = 0; s < 2 * L; ++s) dr.row(s) *= std::polar(1.0, 2.0 * std::numbers::pi * (s / 2) / L);
  const CMatrix S = sys.left_rows(occ, Eigen::all) * dr;
  Eigen::PartialPivLU<CMatrix> lu(S);
  const CMatrix& u = lu.matrixLU();
  double logabs = 0.0, phase = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    logabs += std::log(std::abs(u(i, i)));
    phase += std::arg(u(i, i));
  }
  if (lu.permutationP().determinant() < 0) phase += std::numbers::pi;
  RestaResult r;
  r.det_norm = std::exp(logabs);
  r.well_defined = r.det_norm >= 1e-10;
  r.raw = wrap01(phase / (2.0 * std::numbers::pi));
  r.offset_defined = (L % 2 == 1);
  if (r.offset_defined) {
    const long k = static_cast<long>((L - 1) / 2) * 1;
    r.corrected = wrap01(r.raw + (k % 2 ? 0.5 : 0.0));
  } else {
    r.corrected = r.raw;
  }
  return r;
}

inline double flux_polarization(const CorrelationMatrix& c) {
  const cplx tr = c.entries.trace();
  if (std::abs(tr.imag()) >= 1e-6) throw Error(ErrorCode::PairingViolation, "imaginary trace of C");
  return wrap01(tr.real());
}

inline double chiral_pairing_check(const EntanglementReport& r) { return pairing_residual(r.spectrum); }

}  // namespace nbt
