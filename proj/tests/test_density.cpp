#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "maupertuis/density.hpp"

using namespace maup;

namespace {

double rel_diff(double a, double b) {
  const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
  return std::fabs(a - b) / scale;
}

}  // namespace

TEST_CASE("free gas in three dimensions matches the closed form") {
  const double params[2][2] = {{1.0, 1.0}, {2.0, 0.7}};
  for (const double* mh : params) {
    const double m = mh[0], hb = mh[1];
    potential pot = potential::free_particle(3, m, hb);
    for (double e : {0.5, 1.0, 2.7}) {
      density_breakdown b = semiclassical_density(pot, e, {0.3, 0.1, -0.2});
      const double exact =
          std::pow(2.0 * m, 1.5) * std::sqrt(e) / (4.0 * M_PI * M_PI * std::pow(hb, 3));
      REQUIRE(rel_diff(b.total, exact) <= 1e-12);
      REQUIRE(b.terms[1] == 0.0);
      REQUIRE(b.terms[2] == 0.0);
    }
  }
}

TEST_CASE("continuation route equals the direct form per term in every dimension") {
  std::mt19937_64 g(23);
  for (int d = 1; d <= 5; ++d) {
    struct case_t {
      potential pot;
      double energy, box;
    };
    const case_t cases[] = {{potential::harmonic(d), 5.0, 1.6},
                            {potential::quartic(d, 0.7), 5.0, 1.6},
                            {potential::gaussian_well(d, 1.0, 1.2), -0.05, 0.9},
                            {potential::coulomb_regularized(d, 0.5), -0.6, 0.7},
                            {potential::free_particle(d), 1.0, 1.6}};
    for (const case_t& c : cases) {
      std::uniform_real_distribution<double> u(-c.box, c.box);
      int kept = 0;
      while (kept < 20) {
        vecd x(d);
        for (double& v : x) v = u(g);
        if (c.energy - c.pot.value(x) < 1e-3) continue;
        density_breakdown a = semiclassical_density(c.pot, c.energy, x);
        density_breakdown b = density_from_resolvent(c.pot, c.energy, x);
        REQUIRE(a.terms.size() == 3);
        REQUIRE(b.terms.size() == 3);
        for (int k = 0; k < 3; ++k) REQUIRE(rel_diff(a.terms[k], b.terms[k]) <= 1e-12);
        ++kept;
      }
    }
  }
}

TEST_CASE("reciprocal-Gamma poles zero the corrections at D = 2 and D = 4") {
  for (int d : {2, 4}) {
    potential pot = potential::harmonic(d);
    vecd x(d, 0.3);
    density_breakdown a = semiclassical_density(pot, 4.0, x);
    density_breakdown b = density_from_resolvent(pot, 4.0, x);
    REQUIRE(a.terms[1] == 0.0);
    REQUIRE(a.terms[2] == 0.0);
    REQUIRE(b.terms[1] == 0.0);
    REQUIRE(b.terms[2] == 0.0);
    REQUIRE(a.terms[0] > 0.0);
  }
}

TEST_CASE("density transforms correctly between unit systems") {
  // x2 = lambda x1, E2 = eps E1 with M2 = alpha, omega2 = sqrt(eps/alpha)/lambda,
  // hbar2 = lambda sqrt(eps alpha): every term picks up exactly 1/(lambda^D eps).
  const double alpha = 2.0, eps = 3.0, lambda = 1.7;
  for (int d : {1, 3}) {
    potential p1 = potential::harmonic(d, 1.0, 1.0, 1.0);
    potential p2 = potential::harmonic(d, std::sqrt(eps / alpha) / lambda, alpha,
                                       lambda * std::sqrt(eps * alpha));
    vecd x1(d);
    for (int i = 0; i < d; ++i) x1[i] = 0.2 + 0.1 * i;
    vecd x2 = scaled(x1, lambda);
    const double e1 = 2.0, e2 = eps * e1;
    density_breakdown b1 = semiclassical_density(p1, e1, x1);
    density_breakdown b2 = semiclassical_density(p2, e2, x2);
    const double jac = std::pow(lambda, d) * eps;
    for (int k = 0; k < 3; ++k) {
      if (b1.terms[k] == 0.0) REQUIRE(b2.terms[k] == 0.0);
      else REQUIRE(rel_diff(b2.terms[k] * jac, b1.terms[k]) <= 1e-12);
    }
  }
}

TEST_CASE("near-turning points are flagged, forbidden points rejected") {
  potential pot = potential::harmonic(1);
  REQUIRE(semiclassical_density(pot, 2.0, {0.0}).regime == density_regime::allowed);
  REQUIRE(semiclassical_density(pot, 2.0, {1.95}).regime == density_regime::near_turning);
  try {
    semiclassical_density(pot, 2.0, {3.0});
    FAIL("expected forbidden_region_error");
  } catch (const forbidden_region_error& e) {
    REQUIRE(e.energy_gap() < 0.0);
    REQUIRE(std::string(e.what()).find("resolvent_diagonal") != std::string::npos);
  }
}

TEST_CASE("integrated density of states of the harmonic well is 1/omega") {
  for (double omega : {1.0, 2.0}) {
    potential pot = potential::harmonic(1, omega);
    for (double e : {5.5, 10.5}) {
      dos_breakdown b = integrated_dos(pot, e, 0);
      REQUIRE(std::fabs(b.total - 1.0 / omega) <= 1e-9);
      REQUIRE(b.x_right == Catch::Approx(std::sqrt(2.0 * e) / omega).epsilon(1e-10));
      REQUIRE(b.x_left == Catch::Approx(-b.x_right).epsilon(1e-10));
    }
  }
}

TEST_CASE("masked correction terms stay finite and carry a truncation estimate") {
  // For the harmonic well the exact corrections to the counting function vanish
  // only by cancellation against turning-point boundary layers; a masked cell
  // integral cannot see that, so the breakdown must flag the large remainder
  // through its truncation estimate instead of silently folding it in.
  potential pot = potential::harmonic(1);
  dos_breakdown b = integrated_dos(pot, 10.5, 2);
  REQUIRE(b.terms.size() == 3);
  REQUIRE(std::fabs(b.terms[0] - 1.0) <= 1e-6);
  REQUIRE(std::isfinite(b.terms[1]));
  REQUIRE(std::isfinite(b.terms[2]));
  REQUIRE(b.total == b.terms[0] + b.terms[1] + b.terms[2]);
  REQUIRE(b.truncation_estimate == std::fabs(b.terms[2]));
  REQUIRE(b.truncation_estimate > 0.01);
  REQUIRE(b.mask_lo > b.x_left);
  REQUIRE(b.mask_hi < b.x_right);
}

TEST_CASE("density-of-states input validation") {
  potential pot = potential::harmonic(1);
  dos_options narrow;
  narrow.bracket_lo = -1.0;
  narrow.bracket_hi = 1.0;
  REQUIRE_THROWS_AS(integrated_dos(pot, 5.5, 0, narrow), integration_error);
  REQUIRE_THROWS_AS(integrated_dos(pot, -1.0, 0), forbidden_region_error);
  try {
    integrated_dos(potential::harmonic(2), 5.5, 0);
    FAIL("expected config_error");
  } catch (const config_error& e) {
    REQUIRE(std::string(e.what()).find("integrated_dos_box") != std::string::npos);
  }
}

TEST_CASE("box quadrature reproduces the free gas over a unit box") {
  potential pot = potential::free_particle(3);
  rect_grid grid{{0.05, 0.05, 0.05}, {0.1, 0.1, 0.1}, {10, 10, 10}};
  density_breakdown box = integrated_dos_box(pot, 1.0, grid, 2);
  const double exact = std::pow(2.0, 1.5) / (4.0 * M_PI * M_PI);
  REQUIRE(rel_diff(box.total, exact) <= 1e-12);
  REQUIRE_THROWS_AS(integrated_dos_box(potential::harmonic(2), 1.0, grid, 0), config_error);
}

TEST_CASE("momentum-space constant-curvature report") {
  hydrogen_report rep = hydrogen_momentum_case(3, 1.0);
  REQUIRE(rep.r == Catch::Approx(12.0).epsilon(1e-14));
  REQUIRE(rep.xi_used == Catch::Approx(1.0 / 12.0).epsilon(1e-14));
  REQUIRE(rep.subtraction_used == Catch::Approx(1.0).epsilon(1e-14));
  REQUIRE(rep.xi_weyl == Catch::Approx(1.0 / 8.0).epsilon(1e-14));
  REQUIRE(rep.subtraction_weyl == Catch::Approx(0.75).epsilon(1e-14));

  hydrogen_report flat2 = hydrogen_momentum_case(2, 0.8);
  REQUIRE(flat2.xi_weyl == 0.0);
  REQUIRE(flat2.subtraction_weyl == 0.0);
  REQUIRE(flat2.r == Catch::Approx(2.0 * 2.0 * 1.0 * 0.64).epsilon(1e-14));

  REQUIRE_THROWS_AS(hydrogen_momentum_case(1, 1.0), config_error);
  REQUIRE_THROWS_AS(hydrogen_momentum_case(3, 0.0), config_error);
}
