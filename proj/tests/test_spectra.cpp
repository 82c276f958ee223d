#include <catch_amalgamated.hpp>

#include <random>

#include "nbt/spectra.hpp"
#include "nbt/surrogate.hpp"
#include "oracles.hpp"

using namespace nbt;

namespace {

CMatrix surrogate_matrix(const ModelParams& p, int L) {
  return build_surrogate(compute_gbz(p), p, L, default_n_max(L)).realized;
}

int count_near(const CVector& v, cplx x, double tol) {
  int n = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) n += std::abs(v[i] - x) < tol;
  return n;
}

}  // namespace

TEST_CASE("biorth_eig", "[spectra]") {
  SECTION("2x2 closed form") {
    CMatrix m(2, 2);
    const cplx a(1.3, 0.2), b(0.4, -0.7);
    m << 0.0, a, b, 0.0;
    const auto s = biorth_eig(m);
    const cplx e = std::sqrt(a * b);
    CHECK(count_near(s.energies, e, 1e-12) == 1);
    CHECK(count_near(s.energies, -e, 1e-12) == 1);
  }
  SECTION("Hermitian input: left equals right") {
    std::mt19937 rng(5);
    std::normal_distribution<double> nd;
    CMatrix a(12, 12);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) a(i, j) = cplx(nd(rng), nd(rng));
    const CMatrix h = a + a.adjoint();
    const auto s = biorth_eig(h);
    for (int j = 0; j < 12; ++j) {
      CVector r = s.right.col(j), l = s.left_vectors().col(j);
      // both unit-norm up to a phase fixed by the biorthonormality
      CHECK((r - l).norm() < 1e-10);
    }
  }
  SECTION("biorthonormality, completeness, ordering") {
    const auto s = biorth_eig(real_space_hamiltonian({0.8, 1, 0.2, 0.4}, 20, Boundary::Periodic));
    const CMatrix g = s.left_rows * s.right;
    CHECK((g - CMatrix::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((s.right * s.left_rows - CMatrix::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-6);
    for (int j = 1; j < 40; ++j) CHECK(s.energies[j - 1].real() <= s.energies[j].real());
  }
  SECTION("circular surrogate has a real spectrum") {
    const auto s = biorth_eig(surrogate_matrix({0.8, 1, 0, 0.4}, 60));
    for (Eigen::Index j = 0; j < s.size(); ++j) CHECK(std::abs(s.energies[j].imag()) < 1e-6);
  }
  SECTION("defective input") {
    CMatrix j(2, 2);
    j << 0.0, 1.0, 0.0, 0.0;
    try {
      biorth_eig(j);
      FAIL("expected near-defective error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NearDefective);
    }
  }
}

TEST_CASE("occupied_projector", "[spectra]") {
  SECTION("Hermitian SSH half filling") {
    const int L = 30;
    const auto s = biorth_eig(real_space_hamiltonian({0.5, 1, 0, 0}, L, Boundary::Periodic));
    const CMatrix p = occupied_projector(s);
    CHECK(std::abs(p.trace() - cplx(L)) < 1e-10);
  }
  SECTION("surrogate projector is idempotent; complement") {
    const int L = 200;
    const auto s = biorth_eig(surrogate_matrix({0.8, 1, 0.2, 0.4}, L));
    const CMatrix p = occupied_projector(s);
    CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(std::abs(p.trace() - cplx(L)) < 1e-6);
    CMatrix q = CMatrix::Zero(2 * L, 2 * L);
    for (Eigen::Index j = 0; j < s.size(); ++j)
      if (s.energies[j].real() > 0) q += s.right.col(j) * s.left_rows.row(j);
    CHECK((CMatrix::Identity(2 * L, 2 * L) - p - q).cwiseAbs().maxCoeff() < 1e-6);
  }
  SECTION("zero line is refused") {
    const auto s = biorth_eig(real_space_hamiltonian({1, 1, 0, 0}, 8, Boundary::Periodic));
    try {
      occupied_projector(s);
      FAIL("expected half-filling error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::HalfFillingAmbiguous);
    }
  }
}

TEST_CASE("correlation_matrix", "[spectra]") {
  const int L = 40;
  const auto s = biorth_eig(real_space_hamiltonian({0.5, 1, 0, 0}, L, Boundary::Periodic));
  const CMatrix p = occupied_projector(s);
  SECTION("full system") {
    const auto c = correlation_matrix(p, {0, L});
    const auto ev = eigvals(c.entries);
    CHECK(count_near(ev, 0.0, 1e-6) == L);
    CHECK(count_near(ev, 1.0, 1e-6) == L);
  }
  SECTION("topological SSH half chain: two modes at 1/2") {
    const auto c = correlation_matrix(p, {0, L / 2});
    CHECK(count_near(eigvals(c.entries), 0.5, 1e-6) == 2);
    cplx tr{};
    for (int i = 0; i < L; ++i) tr += p(i, i);
    CHECK(std::abs(c.entries.trace() - tr) < 1e-14);
  }
  SECTION("direct construction equals the restricted projector, with wrap") {
    for (CellRange a : {CellRange{0, 20}, CellRange{35, 10}}) {
      CHECK((correlation_matrix(s, a).entries - correlation_matrix(p, a).entries).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SECTION("Hermitian correlation matrix") {
    const auto c = correlation_matrix(p, {3, 17});
    CHECK((c.entries - c.entries.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK_THROWS_AS(correlation_matrix(p, {0, 1}), Error);
}

TEST_CASE("entanglement_spectrum", "[spectra]") {
  SECTION("Hermitian limit matches a self-adjoint solve") {
    const int L = 60;
    const ModelParams p{0.5, 1, 0.2, 0};
    const auto s = biorth_eig(real_space_hamiltonian(p, L, Boundary::Periodic));
    const auto c = correlation_matrix(s, {0, L / 2});
    const auto r = entanglement_spectrum(c);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(c.entries);
    REQUIRE(r.spectrum.size() == L);
    for (Eigen::Index m = 0; m < r.spectrum.size(); ++m) {
      CHECK(std::abs(r.spectrum[m].imag()) < 1e-10);
      CHECK(r.spectrum[m].real() > -1e-10);
      CHECK(r.spectrum[m].real() < 1 + 1e-10);
      CHECK(std::abs(r.spectrum[m].real() - es.eigenvalues()[m]) < 1e-10);
    }
    CHECK(r.pairing_residual < 1e-10);
  }
  SECTION("anomalous pair outside [0,1]") {
    const int L = 200;
    const auto s = biorth_eig(surrogate_matrix({0.8, 1, 0.2, 0.4}, L));
    const auto r = entanglement_spectrum(correlation_matrix(s, {0, L / 2}));
    double hi = -1e9, lo = 1e9;
    for (Eigen::Index m = 0; m < r.spectrum.size(); ++m)
      hi = std::max(hi, r.spectrum[m].real()), lo = std::min(lo, r.spectrum[m].real());
    CHECK(hi > 1.0 + 1e-3);
    CHECK(lo < -1e-3);
    CHECK(std::abs(hi + lo - 1.0) < 1e-6);
    CHECK(r.pairing_residual < 1e-6);
    CHECK(count_near(r.spectrum, 0.5, 1e-2) == 2);
  }
  SECTION("conventional boundary pair") {
    const int L = 200;
    const auto s = biorth_eig(surrogate_matrix({1.5, 1, 0.2, 0.4}, L));
    const auto r = entanglement_spectrum(correlation_matrix(s, {0, L / 2}));
    CHECK(count_near(r.spectrum, 0.96, 0.01) >= 1);
    CHECK(count_near(r.spectrum, 0.04, 0.01) >= 1);
    CHECK(count_near(r.spectrum, 0.5, 1e-2) == 0);
    CHECK(std::abs(r.gap - 0.4587) < 1e-3);
  }
  SECTION("midgap pinning at L = 400") {
    const int L = 400;
    const auto s = biorth_eig(surrogate_matrix({0.8, 1, 0.2, 0.4}, L));
    const auto r = entanglement_spectrum(correlation_matrix(s, {0, L / 2}));
    CHECK(count_near(r.spectrum, 0.5, 1e-4) == 2);
    CHECK(r.pairing_residual < 1e-6);
  }
}
