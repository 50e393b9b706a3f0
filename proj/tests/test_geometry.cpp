#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "maupertuis/geometry.hpp"

using namespace maup;

TEST_CASE("scalar curvature: closed form agrees with tensor assembly") {
  std::mt19937_64 g(17);
  for (int d : {2, 3}) {
    const potential pots[] = {potential::harmonic(d), potential::quartic(d),
                              potential::gaussian_well(d, 0.8, 1.0)};
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (const potential& pot : pots) {
      maupertuis_field field(pot, -1.0);
      int kept = 0;
      while (kept < 20) {
        vecd x(d);
        for (double& v : x) v = u(g);
        if (field.omega2(x) <= 1e-3) continue;
        const double ra = ricci_scalar_analytic(pot, -1.0, x);
        const double rf = ricci_scalar_fd(field, x);
        REQUIRE(std::fabs(ra - rf) <= 1e-4 * (1.0 + std::fabs(ra)));
        ++kept;
      }
    }
  }
}

TEST_CASE("scalar curvature: conformal master formula agrees with the closed form") {
  std::mt19937_64 g(18);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  potential pot = potential::gaussian_well(3, 0.9, 1.1);
  maupertuis_field field(pot, -1.2);
  for (int k = 0; k < 40; ++k) {
    vecd x{u(g), u(g), u(g)};
    if (field.omega2(x) <= 1e-3) continue;
    const double rc = ricci_scalar_conformal(analyze(field, x));
    const double ra = ricci_scalar_analytic(pot, -1.2, x);
    REQUIRE(rc == Catch::Approx(ra).epsilon(1e-10));
  }
}

TEST_CASE("curvature closed form refuses the allowed side and reports the gap") {
  potential pot = potential::harmonic(1);
  try {
    ricci_scalar_analytic(pot, 5.0, {0.1});
    FAIL("expected forbidden_region_error");
  } catch (const forbidden_region_error& e) {
    REQUIRE(e.energy_gap() > 0.0);  // E - V is positive on the allowed side
  }
}

TEST_CASE("connection coefficients match the metric finite-difference route") {
  potential pot = potential::gaussian_well(2, 0.7, 1.3);
  maupertuis_field field(pot, -1.0);
  std::mt19937_64 g(19);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 25; ++k) {
    vecd x{u(g), u(g)};
    tensor3 a = christoffels(analyze(field, x));
    tensor3 b = christoffels_fd_metric(field, x, 1e-5);
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n)
        for (int l = 0; l < 2; ++l)
          REQUIRE(std::fabs(a(m, n, l) - b(m, n, l)) <= 1e-6 * (1.0 + std::fabs(a(m, n, l))));
  }
}

TEST_CASE("one-dimensional curvature vanishes exactly") {
  const potential pots[] = {potential::harmonic(1), potential::quartic(1),
                            potential::gaussian_well(1, 0.8, 1.0),
                            potential::coulomb_regularized(1, 0.5)};
  for (const potential& pot : pots)
    for (double x : {-1.7, -0.4, 0.2, 1.1})
      if (2.0 * (pot.value({x}) + 1.0) > 1e-3)
        REQUIRE(ricci_scalar_analytic(pot, -1.0, {x}) == 0.0);
}

TEST_CASE("momentum-space metric is maximally symmetric with R = 2D(D-1)p_E^2") {
  for (int d : {2, 3, 4}) {
    for (double pe : {0.5, 1.0}) {
      hydrogen_momentum_field field(d, pe);
      const double expected = 2.0 * d * (d - 1.0) * pe * pe;
      vecd p(d, 0.0);
      p[0] = 0.3 * pe;
      if (d > 1) p[1] = -0.2 * pe;
      curvature_pack pack = curvature_invariants(field, p);
      REQUIRE(pack.r == Catch::Approx(expected).epsilon(1e-6));
      REQUIRE(max_symmetric_residual(pack, d) <= 1e-4 * expected * expected);
      REQUIRE(std::fabs(pack.box_r) <= 1e-4 * expected);
    }
  }
}

TEST_CASE("curvature invariants of the D=3 momentum metric at p_E=1") {
  hydrogen_momentum_field field(3, 1.0);
  curvature_pack pack = curvature_invariants(field, {0.2, -0.1, 0.3});
  REQUIRE(pack.r == Catch::Approx(12.0).epsilon(1e-6));
  REQUIRE(pack.ricci_sq == Catch::Approx(48.0).epsilon(1e-5));
  REQUIRE(pack.riemann_sq == Catch::Approx(48.0).epsilon(1e-5));
  REQUIRE(std::fabs(pack.box_r) <= 1e-3);
}

TEST_CASE("weighted Laplacian is conformally covariant") {
  auto f = [](const vecd& y) { return std::sin(y[0] + 0.7 * y[1]) + 0.2 * y[0] * y[1]; };

  SECTION("two dimensions: no weight, no curvature term contribution") {
    potential pot = potential::harmonic(2);
    maupertuis_field field(pot, -1.0);
    for (double s : {-0.8, 0.1, 0.9})
      REQUIRE(std::fabs(yamabe_covariance_residual(field, f, {s, 0.3 * s}, 1e-3)) <= 1e-12);
  }

  SECTION("three dimensions with quadratic stencil convergence") {
    potential pot = potential::harmonic(3);
    maupertuis_field field(pot, -1.0);
    auto f3 = [](const vecd& y) {
      return std::sin(y[0] + 0.7 * y[1] - 0.3 * y[2]) + 0.2 * y[0] * y[1];
    };
    const vecd x{0.4, -0.2, 0.6};
    REQUIRE(std::fabs(yamabe_covariance_residual(field, f3, x, 1e-3)) <= 1e-4);
    vecd lh, lr;
    for (double h : {4e-3, 2e-3, 1e-3}) {
      lh.push_back(std::log(h));
      lr.push_back(std::log(std::fabs(yamabe_covariance_residual(field, f3, x, h))));
    }
    const double slope = ((lr[0] - lr[2]) / (lh[0] - lh[2]));
    REQUIRE(slope == Catch::Approx(2.0).margin(0.1));
  }
}

TEST_CASE("inadmissible points are rejected with the energy gap attached") {
  potential pot = potential::harmonic(2);
  maupertuis_field field(pot, 1.0);  // allowed near the origin
  REQUIRE_THROWS_AS(analyze(field, {0.0, 0.0}), forbidden_region_error);
}

TEST_CASE("flat Schrodinger samples satisfy the curved equation after transfer") {
  // 1d: psi'' = Omega^2 psi / hbar^2 with V = 0, E = -kappa^2/2 < 0, psi = exp(kappa x).
  // Omega^2 = 2(V - E) = kappa^2 > 0 everywhere, so every interior node is admissible.
  const double kappa = 0.8;
  const double energy = -0.5 * kappa * kappa;
  potential pot = potential::free_particle(1);
  rect_grid grid{{-1.0}, {1e-3}, {2001}};
  vecd psi = sample_grid(grid, [&](const vecd& x) { return std::exp(kappa * x[0]); });
  transfer_result tr = schrodinger_solution_transfer(pot, energy, grid, psi);
  REQUIRE(tr.max_flat() <= 1e-6);
  REQUIRE(tr.max_curved() <= 1e-6);
  REQUIRE(tr.valid[0] == 0);  // boundary nodes are masked
}

TEST_CASE("transfer masks nodes outside the admissible region") {
  // harmonic well with E = 1: the allowed disk |x| < sqrt(2) is inadmissible for V > E work
  potential pot = potential::harmonic(1);
  rect_grid grid{{-3.0}, {0.05}, {121}};
  vecd psi = sample_grid(grid, [](const vecd& x) { return std::exp(-0.5 * x[0] * x[0]); });
  transfer_result tr = schrodinger_solution_transfer(pot, 1.0, grid, psi);
  bool any_valid = false, any_masked = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (tr.valid[i]) any_valid = true;
    else any_masked = true;
  }
  REQUIRE(any_valid);
  REQUIRE(any_masked);
  REQUIRE_THROWS_AS(schrodinger_solution_transfer(pot, 1.0, grid, vecd(7)), config_error);
}
