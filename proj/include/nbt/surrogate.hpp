#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "nbt/gbz.hpp"

namespace nbt {

struct SurrogateHamiltonian {
  int n_max = 0;
  int L = 0;
  std::vector<Block2> hoppings;  // index n + n_max
  CMatrix realized;
  cplx gauge{1.0, 0.0};

  const Block2& hopping(int n) const { return hoppings.at(n + n_max); }
};

enum class DecayKind { Exponential, PowerLaw, Undetermined };

inline const char* to_string(DecayKind k) {
  switch (k) {
    case DecayKind::Exponential: return "exponential";
    case DecayKind::PowerLaw: return "power_law";
    case DecayKind::Undetermined: return "undetermined";
  }
  return "undetermined";
}

struct DecayProfile {
  std::vector<double> magnitudes;  // entry n-1 holds |t_n|
  DecayKind classification = DecayKind::Undetermined;
  double alpha = 0.0;
  double xi = 0.0;
  double fit_residual = 0.0;
};

namespace detail {

inline std::vector<double> angle_weights(const GBZContour& c) {
  const std::size_t n = c.size();
  std::vector<double> w(n);
  const double tau = 2.0 * std::numbers::pi;
  for (std::size_t j = 0; j < n; ++j) {
    double next = c.angles[(j + 1) % n], prev = c.angles[(j + n - 1) % n];
    if (j + 1 == n) next += tau;
    if (j == 0) prev -= tau;
    w[j] = 0.5 * (next - prev) / tau;
  }
  return w;
}

inline Block2 raw_coefficient(const GBZContour& c, const std::vector<Block2>& hs,
                              const std::vector<double>& w, int n) {
  Block2 acc = Block2::Zero();
  for (std::size_t j = 0; j < c.size(); ++j) acc += (w[j] * std::polar(1.0, -n * c.angles[j])) * hs[j];
  return acc;
}

inline cplx sublattice_gauge(const Block2& t0) {
  if (std::abs(t0(0, 1)) == 0.0 || std::abs(t0(1, 0)) == 0.0) return 1.0;
  return std::sqrt(t0(1, 0) / t0(0, 1));
}

inline Block2 apply_gauge(Block2 t, cplx g) {
  t(0, 1) *= g;
  t(1, 0) /= g;
  return t;
}

inline std::vector<Block2> contour_blocks(const GBZContour& c, const ModelParams& p) {
  std::vector<Block2> hs;
  hs.reserve(c.size());
  for (cplx b : c.points) hs.push_back(nonbloch_hamiltonian(p, b));
  return hs;
}

}  // namespace detail

// n-th Fourier coefficient of H(β(θ)) along the contour, in the balanced sublattice gauge.
inline Block2 hopping_coefficient(const GBZContour& contour, const ModelParams& p, int n) {
  const auto hs = detail::contour_blocks(contour, p);
  const auto w = detail::angle_weights(contour);
  const cplx g = detail::sublattice_gauge(detail::raw_coefficient(contour, hs, w, 0));
  return detail::apply_gauge(detail::raw_coefficient(contour, hs, w, n), g);
}

inline int default_n_max(int L) { return std::min(L / 2 - 1, 120); }

inline CMatrix realize_ring(const std::vector<Block2>& hop, int n_max, int L) {
  CMatrix h = CMatrix::Zero(2 * L, 2 * L);
  for (int m = 0; m < L; ++m)
    for (int n = -n_max; n <= n_max; ++n) {
      const int col = ((m + n) % L + L) % L;
      h.block<2, 2>(2 * m, 2 * col) += hop[n + n_max];
    }
  return h;
}

inline SurrogateHamiltonian build_surrogate(const GBZContour& contour, const ModelParams& p, int L, int n_max) {
  if (L < 4) throw Error(ErrorCode::Size, "build_surrogate: L < 4");
  if (n_max < 1 || n_max > L / 2 - 1) throw Error(ErrorCode::Size, "build_surrogate: n_max out of [1, L/2-1]");
  const auto hs = detail::contour_blocks(contour, p);
  const auto w = detail::angle_weights(contour);
  SurrogateHamiltonian s;
  s.n_max = n_max;
  s.L = L;
  s.gauge = detail::sublattice_gauge(detail::raw_coefficient(contour, hs, w, 0));
  s.hoppings.resize(2 * n_max + 1);
  for (int n = -n_max; n <= n_max; ++n) {
    Block2 t = detail::apply_gauge(detail::raw_coefficient(contour, hs, w, n), s.gauge);
    t(0, 0) = t(1, 1) = 0.0;
    s.hoppings[n + n_max] = t;
  }
  s.realized = realize_ring(s.hoppings, n_max, L);
  return s;
}

// Least-squares fits of log|t_n| over n in [4, N]; magnitudes[i] is |t_{i+1}|.
inline DecayProfile fit_decay(std::span<const double> magnitudes) {
  constexpr double floor = 1e-12;
  DecayProfile d;
  d.magnitudes.assign(magnitudes.begin(), magnitudes.end());
  const int nmax = static_cast<int>(magnitudes.size());
  for (int n = 1; n <= std::min(nmax, 16); ++n)
    if (magnitudes[n - 1] < floor) return d;
  std::vector<double> xs_lin, xs_log, ys;
  for (int n = 4; n <= nmax; ++n) {
    if (magnitudes[n - 1] < floor) break;
    xs_lin.push_back(n);
    xs_log.push_back(std::log(n));
    ys.push_back(std::log(magnitudes[n - 1]));
  }
  if (ys.size() < 3) return d;
  auto fit = [&](const std::vector<double>& x, double& slope) {
    const double k = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += ys[i];
      sxx += x[i] * x[i];
      sxy += x[i] * ys[i];
    }
    slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / k;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) ss += std::pow(ys[i] - icpt - slope * x[i], 2);
    return std::sqrt(ss / k);
  };
  double s_lin = 0, s_log = 0;
  const double r_lin = fit(xs_lin, s_lin), r_log = fit(xs_log, s_log);
  if (r_log < r_lin && s_log < 0.0) {
    d.classification = DecayKind::PowerLaw;
    d.alpha = -s_log;
    d.fit_residual = r_log;
  } else if (s_lin < 0.0) {
    d.classification = DecayKind::Exponential;
    d.xi = -1.0 / s_lin;
    d.fit_residual = r_lin;
  }
  return d;
}

inline std::vector<double> hopping_magnitudes(const SurrogateHamiltonian& s) {
  std::vector<double> m(s.n_max);
  for (int n = 1; n <= s.n_max; ++n)
    m[n - 1] = std::max(s.hopping(n).cwiseAbs().maxCoeff(), s.hopping(-n).cwiseAbs().maxCoeff());
  return m;
}

inline DecayProfile hopping_decay_profile(const SurrogateHamiltonian& s) {
  if (s.n_max < 16) throw Error(ErrorCode::Size, "hopping_decay_profile: n_max < 16");
  const auto m = hopping_magnitudes(s);
  return fit_decay(m);
}

}  // namespace nbt
