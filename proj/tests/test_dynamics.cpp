#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "maupertuis/dynamics.hpp"

using namespace maup;

TEST_CASE("Newton integration reproduces the 1d harmonic solution") {
  potential pot = potential::harmonic(1);
  trajectory tr = newton_integrate(pot, {1.0}, {0.5}, 6.0, 1e-10);
  for (double t : {0.3, 1.7, 3.9, 6.0}) {
    REQUIRE(tr.position_at(t)[0] == Catch::Approx(std::cos(t) + 0.5 * std::sin(t)).margin(1e-7));
    REQUIRE(tr.velocity_at(t)[0] == Catch::Approx(-std::sin(t) + 0.5 * std::cos(t)).margin(1e-7));
  }
  REQUIRE(tr.max_drift <= 1e-8);
}

TEST_CASE("free motion is a straight line with l = 2E t") {
  potential pot = potential::free_particle(2);
  trajectory tr = newton_integrate(pot, {0.0, 1.0}, {0.6, -0.2}, 5.0, 1e-10);
  REQUIRE(tr.position_at(5.0)[0] == Catch::Approx(3.0).margin(1e-9));
  REQUIRE(tr.position_at(5.0)[1] == Catch::Approx(0.0).margin(1e-9));
  const double e = 0.5 * (0.36 + 0.04);
  REQUIRE(tr.arclength_at(5.0) == Catch::Approx(2.0 * e * 5.0).margin(1e-9));
}

TEST_CASE("2d harmonic orbit closes after a full period") {
  potential pot = potential::harmonic(2);
  const double period = 2.0 * M_PI;
  trajectory tr = newton_integrate(pot, {1.0, 0.0}, {0.0, 0.7}, period, 1e-11);
  REQUIRE(tr.position_at(period)[0] == Catch::Approx(1.0).margin(1e-7));
  REQUIRE(tr.position_at(period)[1] == Catch::Approx(0.0).margin(1e-7));
}

TEST_CASE("geodesic matches Newton across families and dimensions") {
  struct case_t {
    potential pot;
    vecd x0, v0;
    double t_end;  // kept clear of turning points, where the length map degenerates
  };
  const case_t cases[] = {{potential::harmonic(1), {0.3}, {0.8}, 0.8},
                          {potential::harmonic(2), {1.0, 0.0}, {0.0, 1.0}, 1.2},
                          {potential::harmonic(3), {1.0, 0.2, -0.1}, {0.0, 0.9, 0.3}, 1.2},
                          {potential::quartic(2, 0.6), {1.0, 0.1}, {-0.2, 0.9}, 1.2}};
  for (const case_t& c : cases) {
    comparison_report rep = compare_geodesic_newton(c.pot, c.x0, c.v0, c.t_end, 1e-9);
    REQUIRE(rep.max_deviation <= 1e-6);
    REQUIRE(rep.samples.size() >= 100);
  }
}

TEST_CASE("quarter-period harmonic benchmark meets the headline tolerance") {
  comparison_report rep =
      compare_geodesic_newton(potential::harmonic(2), {1.0, 0.0}, {0.0, 1.0}, 0.5 * M_PI, 1e-9);
  REQUIRE(rep.max_deviation <= 1e-6);
  REQUIRE(rep.energy == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("deviation shrinks as the integrator tolerance tightens") {
  const double devs[2] = {
      compare_geodesic_newton(potential::quartic(2, 0.6), {1.0, 0.1}, {-0.2, 0.9}, 1.2, 1e-6)
          .max_deviation,
      compare_geodesic_newton(potential::quartic(2, 0.6), {1.0, 0.1}, {-0.2, 0.9}, 1.2, 1e-10)
          .max_deviation};
  REQUIRE(devs[1] < devs[0]);
  REQUIRE(devs[1] <= 1e-7);
}

TEST_CASE("geodesics retrace under velocity reversal") {
  potential pot = potential::harmonic(2);
  maupertuis_field field(pot, 1.0);
  trajectory fwd = geodesic_integrate(field, {1.0, 0.0}, {0.0, 1.0}, 1.0, 1e-11);
  const vecd xe = fwd.position_at(1.0);
  vecd ue = fwd.velocity_at(1.0);
  ue = scaled(ue, -1.0);
  trajectory back = geodesic_integrate(field, xe, ue, 1.0, 1e-11);
  REQUIRE(back.position_at(1.0)[0] == Catch::Approx(1.0).margin(1e-8));
  REQUIRE(back.position_at(1.0)[1] == Catch::Approx(0.0).margin(1e-8));
}

TEST_CASE("unit metric speed is preserved along geodesics") {
  potential pot = potential::gaussian_well(2, 0.8, 1.1);
  maupertuis_field field(pot, -1.3);
  trajectory tr = geodesic_integrate(field, {0.4, -0.2}, {1.0, 0.7}, 2.0, 1e-10);
  REQUIRE_FALSE(tr.truncated);
  REQUIRE(tr.max_drift <= 1e-8);
}

TEST_CASE("geodesics on the V > E side follow the inverted-potential flow") {
  // With V = x^2/2 and classical motion impossible, paths obey x'' = +x. From
  // x(0) = 1, x'(0) = 1/2: x(t) = cosh t + sinh t / 2, energy E = V - x'^2/2 = 3/8,
  // and the invariant length is l(t) = int x'^2 dt in closed form below.
  potential pot = potential::harmonic(1);
  const double energy = 0.375;
  maupertuis_field field(pot, energy);
  auto xt = [](double t) { return std::cosh(t) + 0.5 * std::sinh(t); };
  auto lt = [](double t) {
    const double sh = std::sinh(t), ch = std::cosh(t);
    return 0.625 * sh * ch - 0.375 * t + 0.5 * sh * sh;
  };
  trajectory tr = geodesic_integrate(field, {1.0}, {1.0}, lt(1.0), 1e-11);
  for (double t : {0.25, 0.5, 0.75, 1.0})
    REQUIRE(tr.position_at(lt(t))[0] == Catch::Approx(xt(t)).margin(1e-7));
}

TEST_CASE("geodesics stop with a reason at the turning surface") {
  potential pot = potential::harmonic(1);
  maupertuis_field field(pot, 0.5);  // allowed for |x| < 1
  trajectory tr = geodesic_integrate(field, {0.0}, {1.0}, 10.0, 1e-9);
  REQUIRE(tr.truncated);
  REQUIRE(tr.stop_reason == "turning surface");
  REQUIRE(std::fabs(tr.position_at(tr.span())[0]) <= 1.0 + 1e-6);
}

TEST_CASE("eikonal of a unit-speed geodesic equals its parameter span") {
  potential pot = potential::harmonic(2);
  maupertuis_field field(pot, 1.0);
  trajectory tr = geodesic_integrate(field, {1.0, 0.0}, {0.0, 1.0}, 1.3, 1e-11);
  REQUIRE(eikonal(field, tr) == Catch::Approx(tr.span()).margin(1e-8));
}

TEST_CASE("eikonal rejects samples on the turning surface by index") {
  potential pot = potential::harmonic(1);
  maupertuis_field field(pot, 0.5);  // turning points at x = +-1
  auto path = [](double s) { return vecd{s}; };
  auto dpath = [](double) { return vecd{1.0}; };
  try {
    eikonal(field, path, dpath, 0.0, 2.0);
    FAIL("expected forbidden_region_error");
  } catch (const forbidden_region_error& e) {
    REQUIRE(std::string(e.what()).find("sample 1000") != std::string::npos);
  }
}

TEST_CASE("normal perturbations only lengthen a geodesic") {
  potential pot = potential::harmonic(2);
  maupertuis_field field(pot, 1.0);
  trajectory geod = geodesic_integrate(field, {1.0, 0.0}, {0.0, 1.0}, 0.5 * M_PI, 1e-10);
  const double l_end = geod.span();
  const double s_base = eikonal(field, geod);
  for (double a : {3e-2, 1e-2, 3e-3}) {
    auto path = [&](double s) {
      vecd x = geod.position_at(s);
      vecd t = geod.velocity_at(s);
      t = scaled(t, 1.0 / norm(t));
      const vecd n{-t[1], t[0]};
      return axpy(a * std::sin(M_PI * s / l_end), n, x);
    };
    auto dpath = [&](double s) {
      const double h = 1e-6;
      vecd p = path(s + h), q = path(s - h);
      return scaled(axpy(-1.0, q, p), 0.5 / h);
    };
    REQUIRE(eikonal(field, path, dpath, 0.0, l_end) > s_base);
  }
}
