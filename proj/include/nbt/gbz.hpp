#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "nbt/model.hpp"
#include "nbt/polynomial.hpp"

namespace nbt {

struct GBZOptions {
  int seed_chain_length = 120;
  int resample_count = 720;
  double modulus_tolerance = 1e-6;
  bool refine = true;
  double seed_tolerance = 0.25;  // acceptance of raw OBC seeds before refinement
  bool reject_gapless = true;    // E = 0 on the GBZ -> insufficient-seed
};

struct GBZContour {
  std::vector<cplx> points;
  std::vector<double> angles;
  std::vector<cplx> energies;
  bool closed = true;

  std::size_t size() const { return points.size(); }
};

inline int char_degree(const ModelParams& p) {
  return static_cast<int>(detail::trim(characteristic_polynomial(p, 1.0)).size()) - 1;
}

// Middle pair (β_M, β_{M+1}) when their relative modulus mismatch is below tol.
inline std::optional<std::pair<cplx, cplx>> gbz_points_at_energy(const ModelParams& p, cplx E, double tol) {
  const auto c = characteristic_polynomial(p, E);
  std::vector<cplx> r;
  try {
    r = polynomial_roots(c);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (r.size() < 2 || r.size() % 2 != 0) return std::nullopt;
  sort_by_modulus(r);
  const std::size_t m = r.size() / 2;
  const double a = std::abs(r[m - 1]), b = std::abs(r[m]);
  if (a == 0.0 || std::abs(a - b) / a >= tol) return std::nullopt;
  return std::make_pair(r[m - 1], r[m]);
}

// Signed log-modulus mismatch at β: zero exactly on the GBZ, > 0 inside, < 0 outside.
inline double gbz_mismatch(const ModelParams& p, cplx beta) {
  const cplx e2 = r_plus(p, beta) * r_minus(p, beta);
  const auto c = detail::trim(characteristic_polynomial(p, std::sqrt(e2)));
  const int deg = static_cast<int>(c.size()) - 1;
  // synthetic division by (x - β), highest order first
  std::vector<cplx> q(deg);
  q[deg - 1] = c[deg];
  for (int i = deg - 1; i >= 1; --i) q[i - 1] = c[i] + q[i] * beta;
  std::vector<cplx> others;
  if (deg - 1 >= 1) others = polynomial_roots(q);
  if (static_cast<int>(others.size()) < deg / 2) return std::numeric_limits<double>::quiet_NaN();
  sort_by_modulus(others);
  return std::log(std::abs(others[deg / 2 - 1])) - std::log(std::abs(beta));
}

// Bisection in log r at fixed angle.
inline std::optional<double> refine_radius(const ModelParams& p, double theta, double r0) {
  auto f = [&](double lr) { return gbz_mismatch(p, std::polar(std::exp(lr), theta)); };
  double lo = std::log(r0) - 0.03, hi = std::log(r0) + 0.03;
  double flo = f(lo), fhi = f(hi);
  for (int k = 0; k < 80 && !(flo > 0.0 && fhi < 0.0); ++k) {
    if (!(flo > 0.0)) flo = f(lo -= 0.03 * (k + 1));
    if (!(fhi < 0.0)) fhi = f(hi += 0.03 * (k + 1));
  }
  if (!(flo > 0.0 && fhi < 0.0)) return std::nullopt;
  for (int it = 0; it < 64 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm > 0.0) lo = mid;
    else if (fm < 0.0) hi = mid;
    else return std::exp(mid);
  }
  return std::exp(0.5 * (lo + hi));
}

// Diagonal similarity that tames the skin-effect non-normality of the OBC matrix.
inline std::pair<double, double> obc_preconditioner(const ModelParams& p) {
  double g = std::sqrt(std::abs((p.t1 - p.gamma) / (p.t1 + p.gamma)));
  if (!std::isfinite(g) || g == 0.0) g = 1.0;
  double rho = 1.0;
  try {
    auto r = polynomial_roots(characteristic_polynomial(p, 0.0));
    if (r.size() >= 2 && r.size() % 2 == 0) {
      sort_by_modulus(r);
      const std::size_t m = r.size() / 2;
      rho = std::sqrt(std::abs(r[m - 1] * r[m]));
    }
  } catch (const Error&) {
  }
  if (!std::isfinite(rho) || rho == 0.0) rho = 1.0;
  return {rho, g};
}

inline std::vector<cplx> obc_energy_samples(const ModelParams& p, int L) {
  if (L < 40) throw Error(ErrorCode::Size, "obc_energy_samples: L < 40");
  CMatrix h = real_space_hamiltonian(p, L, Boundary::Open);
  const auto [rho, g] = obc_preconditioner(p);
  std::vector<double> s(2 * L);
  for (int n = 0; n < L; ++n) {
    const double base = std::pow(rho, n - L / 2);
    s[2 * n] = base;
    s[2 * n + 1] = base * g;
  }
  for (int j = 0; j < 2 * L; ++j)
    for (int i = 0; i < 2 * L; ++i)
      if (h(i, j) != cplx{}) h(i, j) *= s[j] / s[i];
  const CVector ev = eigvals(h);
  std::vector<cplx> out;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev[i]) >= 1e-6) out.push_back(ev[i]);
  return out;
}

inline double circular_gbz_radius(const ModelParams& p) {
  if (p.t3 != 0.0) throw Error(ErrorCode::NotApplicable, "circular GBZ requires t3 = 0");
  if (std::abs(std::abs(p.t1) - std::abs(p.gamma)) == 0.0)
    throw Error(ErrorCode::SingularRadius, "|t1| = |gamma|");
  return std::sqrt(std::abs((p.t1 - p.gamma) / (p.t1 + p.gamma)));
}

inline bool zero_energy_on_gbz(const ModelParams& p, double tol = 1e-6) {
  return gbz_points_at_energy(p, 0.0, tol).has_value();
}

// Band energies ±sqrt(R+R-) along the contour, sign fixed by continuity.
inline std::vector<cplx> contour_energies(const ModelParams& p, const std::vector<cplx>& pts) {
  std::vector<cplx> e(pts.size());
  cplx prev{};
  for (std::size_t j = 0; j < pts.size(); ++j) {
    cplx v = std::sqrt(r_plus(p, pts[j]) * r_minus(p, pts[j]));
    if (j == 0) {
      if (v.real() > 0.0) v = -v;
    } else if (std::abs(v - prev) > std::abs(-v - prev)) {
      v = -v;
    }
    e[j] = prev = v;
  }
  return e;
}

inline GBZContour compute_gbz(const ModelParams& p, const GBZOptions& opts = {}) {
  if (opts.resample_count < 64) throw Error(ErrorCode::Config, "gbz.resample_count < 64");
  if (!(opts.modulus_tolerance > 0.0) || !(opts.seed_tolerance > 0.0))
    throw Error(ErrorCode::Config, "gbz tolerances must be positive");
  if (char_degree(p) < 2) throw Error(ErrorCode::InsufficientSeed, "characteristic polynomial has no middle pair");
  if (opts.reject_gapless && zero_energy_on_gbz(p))
    throw Error(ErrorCode::InsufficientSeed, "bulk gap closes at E = 0");

  struct Raw {
    double theta, r, resid;
  };
  std::vector<Raw> raw;
  const double accept = opts.refine ? opts.seed_tolerance : opts.modulus_tolerance;
  for (cplx E : obc_energy_samples(p, opts.seed_chain_length)) {
    auto pair = gbz_points_at_energy(p, E, accept);
    if (!pair) continue;
    for (cplx b : {pair->first, pair->second}) {
      double th = std::arg(b);
      if (th < 0.0) th += 2.0 * std::numbers::pi;
      double r = std::abs(b);
      if (opts.refine) {
        auto rr = refine_radius(p, th, r);
        if (!rr) continue;
        r = *rr;
      }
      const double resid = std::abs(gbz_mismatch(p, std::polar(r, th)));
      if (!std::isfinite(resid)) continue;
      if (opts.refine && resid > opts.modulus_tolerance) continue;
      raw.push_back({th, r, resid});
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) { return a.theta < b.theta; });
  std::vector<Raw> uniq;
  for (const auto& x : raw) {
    if (!uniq.empty() && x.theta - uniq.back().theta < 1e-10) {
      if (x.resid < uniq.back().resid) uniq.back() = x;
    } else {
      uniq.push_back(x);
    }
  }
  if (uniq.size() > 1 && uniq.back().theta - (uniq.front().theta + 2.0 * std::numbers::pi) > -1e-10) uniq.pop_back();
  if (uniq.size() < 32)
    throw Error(ErrorCode::InsufficientSeed, "only " + std::to_string(uniq.size()) + " GBZ seed points");

  const int n = opts.resample_count;
  GBZContour out;
  out.points.resize(n);
  out.angles.resize(n);
  const std::size_t m = uniq.size();
  for (int j = 0; j < n; ++j) {
    const double th = 2.0 * std::numbers::pi * j / n;
    // periodic linear interpolation of log r
    auto it = std::upper_bound(uniq.begin(), uniq.end(), th, [](double t, const Raw& x) { return t < x.theta; });
    const std::size_t hi = (it == uniq.end()) ? 0 : static_cast<std::size_t>(it - uniq.begin());
    const std::size_t lo = (hi + m - 1) % m;
    double t_lo = uniq[lo].theta, t_hi = uniq[hi].theta;
    if (t_hi <= t_lo) t_hi += 2.0 * std::numbers::pi;
    double t = th;
    if (t < t_lo) t += 2.0 * std::numbers::pi;
    const double w = (t - t_lo) / (t_hi - t_lo);
    double r = std::exp((1.0 - w) * std::log(uniq[lo].r) + w * std::log(uniq[hi].r));
    if (opts.refine) {
      if (auto rr = refine_radius(p, th, r)) r = *rr;
    }
    out.angles[j] = th;
    out.points[j] = std::polar(r, th);
  }
  out.energies = contour_energies(p, out.points);
  out.closed = true;
  return out;
}

inline GBZContour unit_circle_contour(const ModelParams& p, int n) {
  GBZContour c;
  c.points.resize(n);
  c.angles.resize(n);
  for (int j = 0; j < n; ++j) {
    c.angles[j] = 2.0 * std::numbers::pi * j / n;
    c.points[j] = std::polar(1.0, c.angles[j]);
  }
  c.energies = contour_energies(p, c.points);
  return c;
}

inline double max_modulus_residual(const ModelParams& p, const GBZContour& c) {
  double worst = 0.0;
  for (cplx b : c.points) worst = std::max(worst, std::abs(gbz_mismatch(p, b)));
  return worst;
}

}  // namespace nbt
