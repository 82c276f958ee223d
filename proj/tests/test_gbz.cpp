#include <catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "nbt/gbz.hpp"
#include "oracles.hpp"

using namespace nbt;

namespace {

bool has_root(const std::vector<cplx>& r, cplx x, double tol) {
  for (auto v : r)
    if (std::abs(v - x) < tol) return true;
  return false;
}

double max_radial_deviation(const GBZContour& c, double r0) {
  double d = 0.0;
  for (auto b : c.points) d = std::max(d, std::abs(std::abs(b) - r0));
  return d;
}

}  // namespace

TEST_CASE("polynomial_roots", "[gbz]") {
  const auto q = polynomial_roots({cplx(-1), cplx(0), cplx(1)});
  REQUIRE(q.size() == 2);
  CHECK(has_root(q, 1.0, 1e-12));
  CHECK(has_root(q, -1.0, 1e-12));

  const auto u = polynomial_roots({cplx(-1), cplx(0), cplx(0), cplx(0), cplx(1)});
  REQUIRE(u.size() == 4);
  for (cplx z : {cplx(1), cplx(-1), cplx(0, 1), cplx(0, -1)}) CHECK(has_root(u, z, 1e-12));

  std::mt19937 rng(3);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 50; ++t) {
    std::vector<cplx> c(5);
    for (auto& x : c) x = cplx(nd(rng), nd(rng));
    const auto r = polynomial_roots(c);
    REQUIRE(r.size() == 4);
    CHECK(std::abs(r[0] * r[1] * r[2] * r[3] - c[0] / c[4]) < 1e-8 * std::max(1.0, std::abs(c[0] / c[4])));
    double scale = 0.0;
    for (auto x : c) scale = std::max(scale, std::abs(x));
    for (auto x : r) CHECK(std::abs(detail::horner(c, x)) < 1e-8 * scale);
  }

  CHECK_THROWS_AS(polynomial_roots({cplx(0), cplx(0), cplx(0)}), Error);
  CHECK_THROWS_AS(polynomial_roots({cplx(2.0)}), Error);
}

TEST_CASE("gbz_points_at_energy", "[gbz]") {
  SECTION("Hermitian band energy gives the unit circle") {
    const ModelParams p{0.5, 1, 0.2, 0};
    const double k = 0.7;
    const cplx E = std::sqrt(r_plus(p, std::polar(1.0, k)) * r_minus(p, std::polar(1.0, k)));
    const auto pr = gbz_points_at_energy(p, E, 1e-6);
    REQUIRE(pr);
    CHECK(std::abs(std::abs(pr->first) - 1.0) < 1e-8);
    CHECK(std::abs(std::abs(pr->second) - 1.0) < 1e-8);
  }
  SECTION("circular case") {
    const ModelParams p{0.8, 1, 0, 0.4};
    const auto es = obc_energy_samples(p, 120);
    int hits = 0;
    for (auto E : es) {
      if (auto pr = gbz_points_at_energy(p, E, 1e-3)) {
        ++hits;
        CHECK(std::abs(std::abs(pr->first) - std::sqrt(0.4 / 1.2)) < 1e-4);
      }
    }
    CHECK(hits > 100);
  }
  SECTION("far outside the band") {
    CHECK_FALSE(gbz_points_at_energy({0.8, 1, 0.2, 0.4}, 100.0, 1e-6));
  }
}

TEST_CASE("obc_energy_samples", "[gbz]") {
  CHECK_THROWS_AS(obc_energy_samples({1, 1, 0, 0}, 20), Error);
  SECTION("SSH band edges") {
    for (auto e : obc_energy_samples({0.5, 1, 0, 0}, 80)) {
      CHECK(std::abs(e.imag()) < 1e-10);
      CHECK(std::abs(e.real()) > 0.5 - 0.05);
      CHECK(std::abs(e.real()) < 1.5 + 1e-9);
    }
  }
  SECTION("similarity-transformable case is real") {
    for (auto e : obc_energy_samples({0.8, 1, 0, 0.4}, 120)) CHECK(std::abs(e.imag()) < 1e-8);
  }
  SECTION("count") {
    const auto e = obc_energy_samples({0.8, 1, 0.2, 0.4}, 120);
    CHECK(e.size() == 240 - 2);
  }
}

TEST_CASE("circular_gbz_radius", "[gbz]") {
  CHECK(circular_gbz_radius({0.6, 1, 0, 0}) == 1.0);
  CHECK(std::abs(circular_gbz_radius({0.8, 1, 0, 0.4}) - 0.5773502691896258) < 1e-12);
  CHECK(std::abs(circular_gbz_radius({1.5, 1, 0, 0.4}) - std::sqrt(1.1 / 1.9)) < 1e-12);
  CHECK_THROWS_AS(circular_gbz_radius({0.8, 1, 0.2, 0.4}), Error);
  CHECK_THROWS_AS(circular_gbz_radius({0.4, 1, 0, 0.4}), Error);
  // brute-force oracle agrees
  for (double t1 : {0.8, 1.5}) {
    const ModelParams p{t1, 1, 0, 0.4};
    for (double th : {0.3, 1.9, 4.0}) CHECK(std::abs(oracle::gbz_radius_brute(p, th) - circular_gbz_radius(p)) < 1e-4);
  }
}

TEST_CASE("compute_gbz", "[gbz]") {
  SECTION("Hermitian collapse") {
    for (double t3 : {0.0, 0.2, 0.5}) {
      const auto c = compute_gbz({0.5, 1, t3, 0});
      CHECK(max_radial_deviation(c, 1.0) < 1e-6);
    }
  }
  SECTION("circular oracle") {
    for (double t1 : {0.8, 1.5}) {
      const ModelParams p{t1, 1, 0, 0.4};
      const auto c = compute_gbz(p);
      CHECK(max_radial_deviation(c, circular_gbz_radius(p)) < 1e-4);
    }
  }
  SECTION("non-circular contour and invariants") {
    const ModelParams p{0.8, 1, 0.2, 0.4};
    GBZOptions o;
    const auto c = compute_gbz(p, o);
    REQUIRE(c.size() == 720);
    double rmin = 1e9, rmax = 0.0;
    for (auto b : c.points) rmin = std::min(rmin, std::abs(b)), rmax = std::max(rmax, std::abs(b));
    CHECK(rmax - rmin > 1e-2);
    // uniform angles, strictly increasing
    for (std::size_t j = 1; j < c.size(); ++j)
      CHECK(std::abs(c.angles[j] - c.angles[j - 1] - 2 * std::numbers::pi / 720) < 1e-9);
    // winding number about the origin
    double acc = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) acc += std::arg(c.points[(j + 1) % c.size()] / c.points[j]);
    CHECK(std::lround(acc / (2 * std::numbers::pi)) == 1);
    // modulus condition, re-solved from scratch
    for (std::size_t j = 0; j < c.size(); j += 7) {
      const double gap = oracle::middle_gap(p, c.points[j]);
      CHECK(gap / std::abs(c.points[j]) < 10 * o.modulus_tolerance);
    }
    // brute-force radius at a few angles
    for (std::size_t j : {0u, 100u, 333u, 600u})
      CHECK(std::abs(oracle::gbz_radius_brute(p, c.angles[j]) - std::abs(c.points[j])) < 1e-5);
    // energies consistent with the points
    for (std::size_t j = 0; j < c.size(); j += 11)
      CHECK(std::abs(c.energies[j] * c.energies[j] - r_plus(p, c.points[j]) * r_minus(p, c.points[j])) < 1e-10);
  }
  SECTION("gapless point reports insufficient seed") {
    try {
      compute_gbz({1.2, 1, 0.3, 1.0});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InsufficientSeed);
    }
  }
  SECTION("option validation") {
    GBZOptions o;
    o.resample_count = 10;
    CHECK_THROWS_AS(compute_gbz({0.5, 1, 0, 0}, o), Error);
  }
}
