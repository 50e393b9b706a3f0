#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "maupertuis/potential.hpp"

using namespace maup;

namespace {

double fd_grad(const potential& pot, const vecd& x, int i, double h) {
  vecd xp = x, xm = x;
  xp[i] += h;
  xm[i] -= h;
  return (pot.value(xp) - pot.value(xm)) / (2.0 * h);
}

double fd_hess(const potential& pot, const vecd& x, int i, int k, double h) {
  vecd xp = x, xm = x;
  xp[i] += h;
  xm[i] -= h;
  vecd gp = pot.gradient(xp), gm = pot.gradient(xm);
  return (gp[k] - gm[k]) / (2.0 * h);
}

}  // namespace

TEST_CASE("analytic jets match finite differences across families") {
  std::mt19937_64 g(41);
  for (int d : {1, 2, 3}) {
    const potential pots[] = {potential::free_particle(d),
                              potential::harmonic(d, 1.3),
                              potential::quartic(d, 0.7),
                              potential::gaussian_well(d, 1.1, 0.9),
                              potential::coulomb_regularized(d, 0.4)};
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (const potential& pot : pots) {
      for (int trial = 0; trial < 100; ++trial) {
        vecd x(d);
        for (double& v : x) v = u(g);
        potential_jet j = pot.eval(x);
        const double h = 1e-5;
        for (int i = 0; i < d; ++i) {
          REQUIRE(std::fabs(j.grad[i] - fd_grad(pot, x, i, h)) <=
                  1e-6 * (1.0 + std::fabs(j.grad[i])));
          for (int k = 0; k < d; ++k) {
            REQUIRE(std::fabs(j.hess(i, k) - fd_hess(pot, x, i, k, h)) <=
                    1e-6 * (1.0 + std::fabs(j.hess(i, k))));
            REQUIRE(j.hess(i, k) == j.hess(k, i));
          }
        }
      }
    }
  }
}

TEST_CASE("quartic closed-form spot values") {
  potential pot = potential::quartic(1, 1.0);
  const vecd x{1.3};
  // V = (x^2)^2: V' = 4 x^3, V'' = 12 x^2
  REQUIRE(pot.value(x) == Catch::Approx(std::pow(1.3, 4)).epsilon(1e-14));
  REQUIRE(pot.gradient(x)[0] == Catch::Approx(4.0 * std::pow(1.3, 3)).epsilon(1e-14));
  REQUIRE(pot.hessian(x)(0, 0) == Catch::Approx(12.0 * 1.3 * 1.3).epsilon(1e-14));
}

TEST_CASE("harmonic scales with mass and frequency") {
  potential pot = potential::harmonic(2, 3.0, 2.0);
  const vecd x{0.4, -0.3};
  REQUIRE(pot.value(x) == Catch::Approx(0.5 * 2.0 * 9.0 * 0.25).epsilon(1e-14));
  REQUIRE(pot.lower_bound() == 0.0);
}

TEST_CASE("gaussian well depth and bound") {
  potential pot = potential::gaussian_well(3, 2.5, 1.2);
  REQUIRE(pot.value({0.0, 0.0, 0.0}) == Catch::Approx(-2.5).epsilon(1e-14));
  REQUIRE(pot.lower_bound() == -2.5);
  REQUIRE(pot.value({30.0, 0.0, 0.0}) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("regularized coulomb stays finite at the origin") {
  potential pot = potential::coulomb_regularized(3, 0.5);
  REQUIRE(pot.value({0.0, 0.0, 0.0}) == Catch::Approx(-2.0).epsilon(1e-14));
  REQUIRE(pot.lower_bound() == -2.0);
  vecd grad = pot.gradient({0.0, 0.0, 0.0});
  for (double v : grad) REQUIRE(v == 0.0);
}

TEST_CASE("tabulated interpolation reproduces smooth data") {
  // the cubic kernel is exact on cubics along each axis; check a linear field exactly
  std::vector<axis_spec> axes{{-2.0, 0.25, 17}, {-1.0, 0.2, 11}};
  vecd values(17 * 11);
  for (int i = 0; i < 17; ++i)
    for (int k = 0; k < 11; ++k) {
      const double x = -2.0 + 0.25 * i, y = -1.0 + 0.2 * k;
      values[static_cast<std::size_t>(i) * 11 + k] = 0.7 * x - 0.4 * y + 0.3;
    }
  potential pot = potential::tabulated(axes, values);
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> ux(-1.4, 1.4), uy(-0.6, 0.6);
  for (int trial = 0; trial < 50; ++trial) {
    const vecd x{ux(g), uy(g)};
    REQUIRE(pot.value(x) == Catch::Approx(0.7 * x[0] - 0.4 * x[1] + 0.3).margin(1e-12));
    REQUIRE(pot.gradient(x)[0] == Catch::Approx(0.7).margin(1e-10));
    REQUIRE(pot.gradient(x)[1] == Catch::Approx(-0.4).margin(1e-10));
  }
}

TEST_CASE("tabulated potential approximates a sampled harmonic well") {
  std::vector<axis_spec> axes{{-3.0, 0.05, 121}};
  vecd values(121);
  for (int i = 0; i < 121; ++i) {
    const double x = -3.0 + 0.05 * i;
    values[i] = 0.5 * x * x;
  }
  potential pot = potential::tabulated(axes, values);
  for (double x : {-1.9, -0.33, 0.0, 0.71, 2.2}) {
    REQUIRE(pot.value({x}) == Catch::Approx(0.5 * x * x).margin(1e-7));
    REQUIRE(pot.gradient({x})[0] == Catch::Approx(x).margin(1e-5));
    REQUIRE(pot.hessian({x})(0, 0) == Catch::Approx(1.0).margin(1e-3));
  }
}

TEST_CASE("configuration errors carry usable messages") {
  REQUIRE_THROWS_AS(potential::tabulated({{0.0, 0.1, 3}}, vecd(3)), config_error);
  REQUIRE_THROWS_AS(potential::tabulated({{0.0, -0.1, 8}}, vecd(8)), config_error);
  REQUIRE_THROWS_AS(potential::tabulated({{0.0, 0.1, 8}}, vecd(9)), config_error);
  potential pot = potential::harmonic(2);
  REQUIRE_THROWS_AS(pot.value({1.0}), evaluation_error);
}
