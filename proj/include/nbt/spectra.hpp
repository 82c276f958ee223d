#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/LU>

#include "nbt/error.hpp"
#include "nbt/linalg.hpp"

namespace nbt {

struct BiorthogonalEigensystem {
  CVector energies;
  CMatrix right;      // columns |R_j>
  CMatrix left_rows;  // rows <L_j| (inverse of `right`)
  std::vector<bool> occupied;

  CMatrix left_vectors() const { return left_rows.adjoint(); }
  Eigen::Index size() const { return energies.size(); }
};

struct CellRange {
  int first = 0;
  int count = 0;
};

struct CorrelationMatrix {
  CMatrix entries;
  CellRange cells;
  int L = 0;
};

struct DegeneracyGroup {
  cplx xi;              // left-weighted class eigenvalue
  int multiplicity = 0;
  double n_left_raw = 0.0;
  int n_left = 0;
  bool bulk = false;    // numerically 0 or 1
  std::vector<int> members;
};

struct EntanglementReport {
  CVector spectrum;
  CMatrix right;
  CMatrix left_rows;
  std::vector<cplx> left_weight;  // <ψL|Π_L|ψR> per mode
  std::vector<DegeneracyGroup> groups;
  bool grouping_resolved = true;
  double max_merge_distance = 0.0;
  double gap = 0.0;
  double pairing_residual = 0.0;
};

struct SpectrumOptions {
  double eps_degenerate = 1e-6;
  double bulk_tolerance = 1e-6;
  double integer_tolerance = 0.1;
  double max_merge_distance = 1e-2;
  double midgap_window = 0.05;
};

inline double completeness_residual(const CMatrix& right, const CMatrix& left_rows) {
  // random probes: ||R (L v) - v|| for a few fixed vectors
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> nd;
  const Eigen::Index n = right.rows();
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(nd(rng), nd(rng));
    v /= v.norm();
    worst = std::max(worst, (right * (left_rows * v) - v).cwiseAbs().maxCoeff());
  }
  return worst;
}

inline BiorthogonalEigensystem biorth_eig(const CMatrix& m) {
  EigenPairs ep = eig_right(m, true);
  const Eigen::Index n = ep.values.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const cplx x = ep.values[a], y = ep.values[b];
    return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag());
  });
  BiorthogonalEigensystem sys;
  sys.energies.resize(n);
  sys.right.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    sys.energies[j] = ep.values[order[j]];
    sys.right.col(j) = ep.vectors.col(order[j]);
  }
  sys.left_rows = sys.right.partialPivLu().inverse();
  const double res = completeness_residual(sys.right, sys.left_rows);
  if (!(res <= 1e-6)) throw Error(ErrorCode::NearDefective, "completeness residual " + std::to_string(res));
  sys.occupied.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) sys.occupied[j] = sys.energies[j].real() < 0.0;
  return sys;
}

inline void check_half_filling(const BiorthogonalEigensystem& sys) {
  for (Eigen::Index j = 0; j < sys.size(); ++j)
    if (std::abs(sys.energies[j].real()) < 1e-8)
      throw Error(ErrorCode::HalfFillingAmbiguous, "energy on the chiral zero line");
}

inline std::vector<Eigen::Index> occupied_indices(const BiorthogonalEigensystem& sys) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index j = 0; j < sys.size(); ++j)
    if (sys.occupied[j]) idx.push_back(j);
  return idx;
}

inline CMatrix occupied_projector(const BiorthogonalEigensystem& sys) {
  check_half_filling(sys);
  const auto occ = occupied_indices(sys);
  return sys.right(Eigen::all, occ) * sys.left_rows(occ, Eigen::all);
}

inline std::vector<Eigen::Index> cell_sites(const CellRange& a, int L) {
  std::vector<Eigen::Index> s;
  for (int i = 0; i < a.count; ++i) {
    const int c = ((a.first + i) % L + L) % L;
    s.push_back(2 * c);
    s.push_back(2 * c + 1);
  }
  return s;
}

inline void check_range(const CellRange& a, int L) {
  if (a.count < 2 || a.count > L) throw Error(ErrorCode::Size, "subsystem size out of range");
}

inline CorrelationMatrix correlation_matrix(const CMatrix& projector, const CellRange& a) {
  const int L = static_cast<int>(projector.rows() / 2);
  check_range(a, L);
  const auto s = cell_sites(a, L);
  return {projector(s, s), a, L};
}

// Same as restricting the projector, without forming it.
inline CorrelationMatrix correlation_matrix(const BiorthogonalEigensystem& sys, const CellRange& a) {
  check_half_filling(sys);
  const int L = static_cast<int>(sys.size() / 2);
  check_range(a, L);
  const auto s = cell_sites(a, L);
  const auto occ = occupied_indices(sys);
  return {sys.right(s, occ) * sys.left_rows(occ, s), a, L};
}

inline double pairing_residual(const CVector& xi) {
  double worst = 0.0;
  for (Eigen::Index m = 0; m < xi.size(); ++m) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index n = 0; n < xi.size(); ++n) best = std::min(best, std::abs(xi[m] + xi[n] - 1.0));
    worst = std::max(worst, best);
  }
  return worst;
}

// Sites of A (local indices) belonging to its first floor(|A|/2) cells.
inline std::vector<bool> left_half_mask(const CorrelationMatrix& c) {
  std::vector<bool> mask(c.entries.rows(), false);
  const int half = c.cells.count / 2;
  for (int i = 0; i < 2 * half; ++i) mask[i] = true;
  return mask;
}

inline std::vector<cplx> left_weights(const CMatrix& right, const CMatrix& left_rows, const std::vector<bool>& mask) {
  std::vector<Eigen::Index> s;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) s.push_back(static_cast<Eigen::Index>(i));
  std::vector<cplx> w(right.cols());
  for (Eigen::Index m = 0; m < right.cols(); ++m) {
    cplx acc{};
    for (auto i : s) acc += left_rows(m, i) * right(i, m);
    w[m] = acc;
  }
  return w;
}

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

inline DegeneracyGroup summarize(const CVector& xi, const std::vector<cplx>& w, std::vector<int> members,
                                 const SpectrumOptions& o) {
  DegeneracyGroup g;
  g.members = std::move(members);
  g.multiplicity = static_cast<int>(g.members.size());
  cplx wsum{}, wx{}, plain{};
  for (int k : g.members) {
    wsum += w[k];
    wx += w[k] * xi[k];
    plain += xi[k];
  }
  g.xi = std::abs(wsum) > 1e-9 ? wx / wsum : plain / static_cast<double>(g.multiplicity);
  g.n_left_raw = wsum.real();
  g.n_left = static_cast<int>(std::lround(g.n_left_raw));
  g.bulk = std::abs(g.xi - std::round(g.xi.real())) < o.bulk_tolerance;
  return g;
}

inline bool ambiguous(const DegeneracyGroup& g, const SpectrumOptions& o) {
  return !g.bulk && std::abs(g.n_left_raw - g.n_left) > o.integer_tolerance;
}

}  // namespace detail

// ε-grouping, then merging of ambiguous classes with their nearest non-bulk neighbour.
inline void group_modes(EntanglementReport& r, const SpectrumOptions& o = {}) {
  const int n = static_cast<int>(r.spectrum.size());
  detail::UnionFind uf(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(r.spectrum[i] - r.spectrum[j]) < o.eps_degenerate) uf.unite(i, j);
  r.grouping_resolved = true;
  r.max_merge_distance = 0.0;
  for (;;) {
    std::vector<std::vector<int>> cls;
    std::vector<int> slot(n, -1);
    for (int i = 0; i < n; ++i) {
      const int root = uf.find(i);
      if (slot[root] < 0) {
        slot[root] = static_cast<int>(cls.size());
        cls.emplace_back();
      }
      cls[slot[root]].push_back(i);
    }
    r.groups.clear();
    for (auto& c : cls) r.groups.push_back(detail::summarize(r.spectrum, r.left_weight, c, o));
    int amb = -1;
    for (std::size_t k = 0; k < r.groups.size() && amb < 0; ++k)
      if (detail::ambiguous(r.groups[k], o)) amb = static_cast<int>(k);
    if (amb < 0) return;
    double best = std::numeric_limits<double>::infinity();
    int target = -1;
    for (std::size_t k = 0; k < r.groups.size(); ++k) {
      if (static_cast<int>(k) == amb || r.groups[k].bulk) continue;
      for (int a : r.groups[amb].members)
        for (int b : r.groups[k].members) {
          const double d = std::abs(r.spectrum[a] - r.spectrum[b]);
          if (d < best) {
            best = d;
            target = static_cast<int>(k);
          }
        }
    }
    if (target < 0 || best > o.max_merge_distance) {
      r.grouping_resolved = false;
      return;
    }
    r.max_merge_distance = std::max(r.max_merge_distance, best);
    uf.unite(r.groups[amb].members.front(), r.groups[target].members.front());
  }
}

inline EntanglementReport entanglement_spectrum(const CorrelationMatrix& c, const std::vector<bool>& left_mask,
                                                const SpectrumOptions& o = {}) {
  const auto sys = biorth_eig(c.entries);
  EntanglementReport r;
  r.spectrum = sys.energies;
  r.right = sys.right;
  r.left_rows = sys.left_rows;
  r.left_weight = left_weights(r.right, r.left_rows, left_mask);
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index m = 0; m < r.spectrum.size(); ++m) {
    const double d = std::abs(r.spectrum[m] - 0.5);
    if (d >= o.midgap_window) gap = std::min(gap, d);
  }
  r.gap = std::isfinite(gap) ? gap : 0.0;
  r.pairing_residual = pairing_residual(r.spectrum);
  group_modes(r, o);
  return r;
}

inline EntanglementReport entanglement_spectrum(const CorrelationMatrix& c, const SpectrumOptions& o = {}) {
  return entanglement_spectrum(c, left_half_mask(c), o);
}

}  // namespace nbt
