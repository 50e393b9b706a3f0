// Trajectory equivalence machinery: Newtonian motion, unit-speed geodesics of the
// energy metric, invariant path length (the eikonal), and the reparameterization
// dl = 2|E - V| dt that maps one onto the other.
//
// Geodesics are insensitive to an overall sign of the metric, so everything here
// runs on |Omega^2| = 2M|V - E| and works on either side of the turning surface.
#ifndef MAUPERTUIS_DYNAMICS_HPP
#define MAUPERTUIS_DYNAMICS_HPP

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "maupertuis/common.hpp"
#include "maupertuis/geometry.hpp"
#include "maupertuis/ode.hpp"

namespace maup {

enum class path_parameter { newtonian_time, invariant_length };

struct trajectory {
  path_parameter kind;
  int dim;
  double energy;
  ode_solution sol;        // state = [x(0..D-1), v(D..2D-1), (arclength for Newton)]
  double max_drift = 0.0;  // energy drift (Newton) or unit-norm drift (geodesic)
  bool truncated = false;
  std::string stop_reason;

  double span() const { return sol.t_end(); }
  vecd position_at(double s) const {
    vecd y = sol.at(s);
    return vecd(y.begin(), y.begin() + dim);
  }
  vecd velocity_at(double s) const {
    vecd y = sol.at(s);
    return vecd(y.begin() + dim, y.begin() + 2 * dim);
  }
  // Newton trajectories integrate l(t) = int 2|E - V| dt as an extra component.
  double arclength_at(double t) const { return sol.at(t)[2 * dim]; }
};

// log-derivative of |Omega^2|; identical formula on both sides of the turning surface
struct factor_point {
  double abs_omega2;
  vecd a;       // d_mu ln|Omega^2| / 2
  matd b;       // d_rho a_mu
  bool have_b;
};

inline factor_point factor_at(const conformal_field& field, const vecd& x, bool with_b,
                              double delta_min) {
  factor_jet f = field.jet(x);
  if (std::fabs(f.omega2) <= delta_min)
    throw forbidden_region_error("trajectory reached the turning surface",
                                 field.energy_gap(f.omega2));
  const int d = field.dim();
  factor_point p{std::fabs(f.omega2), vecd(d), matd(d), with_b};
  for (int i = 0; i < d; ++i) p.a[i] = f.grad[i] / (2.0 * f.omega2);
  if (with_b)
    for (int r = 0; r < d; ++r)
      for (int m = 0; m < d; ++m)
        p.b(r, m) = f.hess(r, m) / (2.0 * f.omega2) -
                    f.grad[r] * f.grad[m] / (2.0 * f.omega2 * f.omega2);
  return p;
}

// Gamma^d_{ab} u^a w^b for the conformal connection.
inline vecd connection_apply(const vecd& a, const vecd& u, const vecd& w) {
  const double au = dot(a, u), aw = dot(a, w), uw = dot(u, w);
  vecd out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = au * w[i] + aw * u[i] - uw * a[i];
  return out;
}

// ---------------------------------------------------------------------------
// Newton

inline trajectory newton_integrate(const potential& pot, const vecd& x0, const vecd& v0,
                                   double t_end, double tol) {
  const int d = pot.dim();
  const double m = pot.mass();
  const double energy = 0.5 * m * dot(v0, v0) + pot.value(x0);
  ode_rhs rhs = [&pot, d, m, energy](double, const vecd& y, vecd& dy) {
    dy.resize(2 * d + 1);
    const vecd x(y.begin(), y.begin() + d);
    potential_jet j = pot.eval(x);
    for (int i = 0; i < d; ++i) dy[i] = y[d + i];
    for (int i = 0; i < d; ++i) dy[d + i] = -j.grad[i] / m;
    dy[2 * d] = 2.0 * std::fabs(energy - j.value);
  };
  vecd y0(2 * d + 1, 0.0);
  for (int i = 0; i < d; ++i) y0[i] = x0[i];
  for (int i = 0; i < d; ++i) y0[d + i] = v0[i];
  ode_options opt;
  opt.tol = tol;
  trajectory tr{path_parameter::newtonian_time, d, energy, dp45_integrate(rhs, 0.0, y0, t_end, opt),
                0.0, false, ""};
  for (std::size_t k = 0; k < tr.sol.t.size(); ++k) {
    const vecd& y = tr.sol.y[k];
    const vecd x(y.begin(), y.begin() + d);
    const vecd v(y.begin() + d, y.begin() + 2 * d);
    tr.max_drift = std::max(tr.max_drift, std::fabs(0.5 * m * dot(v, v) + pot.value(x) - energy));
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Geodesics

// Integrates the unit-speed geodesic from x0 along u0 (rescaled so |Omega^2||u|^2 = 1)
// up to invariant length l_end. Stops early, flagged, if |Omega^2| drops below delta_min.
inline trajectory geodesic_integrate(const conformal_field& field, const vecd& x0, const vecd& u0,
                                     double l_end, double tol, const geometry_options& gopt = {}) {
  const int d = field.dim();
  const double o20 = std::fabs(field.omega2(x0));
  if (o20 <= gopt.delta_min)
    throw forbidden_region_error("geodesic started outside the admissible region",
                                 field.energy_gap(field.omega2(x0)));
  ode_rhs rhs = [&field, d, &gopt](double, const vecd& y, vecd& dy) {
    dy.resize(2 * d);
    const vecd x(y.begin(), y.begin() + d);
    const vecd u(y.begin() + d, y.begin() + 2 * d);
    factor_point p = factor_at(field, x, false, gopt.delta_min);
    vecd guu = connection_apply(p.a, u, u);
    for (int i = 0; i < d; ++i) dy[i] = u[i];
    for (int i = 0; i < d; ++i) dy[d + i] = -guu[i];
  };
  vecd y0(2 * d);
  const double scale = 1.0 / (std::sqrt(o20) * norm(u0));
  for (int i = 0; i < d; ++i) y0[i] = x0[i];
  for (int i = 0; i < d; ++i) y0[d + i] = u0[i] * scale;
  ode_options opt;
  opt.tol = tol;
  // margin above delta_min so the RHS stays evaluable up to the stop
  const double floor2 = 2.0 * gopt.delta_min;
  ode_stop stop = [&field, d, floor2](double, const vecd& y) {
    const vecd x(y.begin(), y.begin() + d);
    return std::fabs(field.omega2(x)) < floor2;
  };
  trajectory tr{path_parameter::invariant_length, d, 0.0,
                dp45_integrate(rhs, 0.0, y0, l_end, opt, stop), 0.0, false, ""};
  tr.truncated = tr.sol.truncated;
  if (tr.truncated) tr.stop_reason = "turning surface";
  for (std::size_t k = 0; k < tr.sol.t.size(); ++k) {
    const vecd& y = tr.sol.y[k];
    const vecd x(y.begin(), y.begin() + d);
    const vecd u(y.begin() + d, y.begin() + 2 * d);
    tr.max_drift =
        std::max(tr.max_drift, std::fabs(std::fabs(field.omega2(x)) * dot(u, u) - 1.0));
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Eikonal (invariant path length)

// S = int sqrt(|Omega^2(x)|) |dx/ds| ds by composite Simpson on a fixed node count.
// Samples sitting on the turning surface make the integrand degenerate; they are
// rejected by index.
inline double eikonal(const conformal_field& field, const std::function<vecd(double)>& path,
                      const std::function<vecd(double)>& dpath, double s0, double s1,
                      int nodes = 2001, double delta_min = 1e-12) {
  if (nodes % 2 == 0) ++nodes;
  const double h = (s1 - s0) / (nodes - 1);
  auto f = [&](double s, int i) {
    const double o2 = field.omega2(path(s));
    if (std::fabs(o2) < delta_min) {
      char msg[96];
      std::snprintf(msg, sizeof msg, "eikonal sample %d lies on the turning surface", i);
      throw forbidden_region_error(msg, field.energy_gap(o2));
    }
    return std::sqrt(std::fabs(o2)) * norm(dpath(s));
  };
  double acc = f(s0, 0) + f(s1, nodes - 1);
  for (int i = 1; i < nodes - 1; ++i) acc += f(s0 + i * h, i) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

inline double eikonal(const conformal_field& field, const trajectory& tr, int nodes = 2001) {
  return eikonal(
      field, [&](double s) { return tr.position_at(s); },
      [&](double s) { return tr.velocity_at(s); }, 0.0, tr.span(), nodes);
}

// ---------------------------------------------------------------------------
// Geodesic <-> Newton comparison

struct deviation_sample {
  double t;         // Newtonian time
  double l;         // invariant length l(t)
  double deviation; // |x_newton(t) - x_geodesic(l(t))|
};

struct comparison_report {
  double energy;
  double l_total;
  double max_deviation;
  trajectory newton;
  trajectory geodesic;
  std::vector<deviation_sample> samples;
};

// Integrates both pictures from the same initial data and measures the position gap
// after mapping Newtonian time to invariant length via dl = 2|E - V| dt.
inline comparison_report compare_geodesic_newton(const potential& pot, const vecd& x0,
                                                 const vecd& v0, double t_end, double tol,
                                                 int n_samples = 200,
                                                 const geometry_options& gopt = {}) {
  trajectory nt = newton_integrate(pot, x0, v0, t_end, tol);
  maupertuis_field field(pot, nt.energy);
  const double l_total = nt.arclength_at(t_end);
  trajectory gt = geodesic_integrate(field, x0, v0, l_total, tol, gopt);
  comparison_report rep{nt.energy, l_total, 0.0, std::move(nt), std::move(gt), {}};
  const double l_reached = rep.geodesic.span();
  for (int k = 0; k <= n_samples; ++k) {
    const double t = t_end * k / n_samples;
    const double l = rep.newton.arclength_at(t);
    if (l > l_reached) break;
    vecd xn = rep.newton.position_at(t);
    vecd xg = rep.geodesic.position_at(l);
    double dev = 0.0;
    for (int i = 0; i < rep.newton.dim; ++i) dev += (xn[i] - xg[i]) * (xn[i] - xg[i]);
    dev = std::sqrt(dev);
    rep.samples.push_back({t, l, dev});
    rep.max_deviation = std::max(rep.max_deviation, dev);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Exponential map with variational (Jacobi) system

struct exp_map_result {
  vecd x1;   // endpoint of the affine geodesic exp_x0(w)
  vecd u1;   // final velocity
  matd j;    // d x1 / d w
};

// Integrates the affine geodesic with initial velocity w over unit parameter together
// with its tangent map. dGamma comes from the analytic factor jet, so the Jacobian is
// integrator-accurate (no FD amplification).
inline exp_map_result geodesic_exp_map(const conformal_field& field, const vecd& x0, const vecd& w,
                                       double tol = 1e-12, const geometry_options& gopt = {}) {
  const int d = field.dim();
  // state: x (d), u (d), Jx (d*d), Ju (d*d); Jx[i][j] = d x_i / d w_j row-major
  ode_rhs rhs = [&field, d, &gopt](double, const vecd& y, vecd& dy) {
    dy.assign(y.size(), 0.0);
    const vecd x(y.begin(), y.begin() + d);
    const vecd u(y.begin() + d, y.begin() + 2 * d);
    factor_point p = factor_at(field, x, true, gopt.delta_min);
    vecd guu = connection_apply(p.a, u, u);
    for (int i = 0; i < d; ++i) dy[i] = u[i];
    for (int i = 0; i < d; ++i) dy[d + i] = -guu[i];
    const std::size_t jx0 = 2 * d, ju0 = jx0 + static_cast<std::size_t>(d) * d;
    const double uu = dot(u, u);
    for (int j = 0; j < d; ++j) {
      vecd jx(d), ju(d);
      for (int i = 0; i < d; ++i) {
        jx[i] = y[jx0 + static_cast<std::size_t>(i) * d + j];
        ju[i] = y[ju0 + static_cast<std::size_t>(i) * d + j];
      }
      // d/dl Jx = Ju
      for (int i = 0; i < d; ++i) dy[jx0 + static_cast<std::size_t>(i) * d + j] = ju[i];
      // d/dl Ju = -(dGamma . jx) u u - 2 Gamma u Ju
      vecd dguu(d, 0.0);
      for (int r = 0; r < d; ++r) {
        // contraction of d_r Gamma with u u: 2 (B_r . u) u - |u|^2 B_r
        double bu = 0.0;
        for (int m = 0; m < d; ++m) bu += p.b(r, m) * u[m];
        for (int i = 0; i < d; ++i)
          dguu[i] += (2.0 * bu * u[i] - uu * p.b(r, i)) * jx[r];
      }
      vecd guju = connection_apply(p.a, u, ju);
      for (int i = 0; i < d; ++i)
        dy[ju0 + static_cast<std::size_t>(i) * d + j] = -dguu[i] - 2.0 * guju[i];
    }
  };
  vecd y0(2 * d + 2 * static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) y0[i] = x0[i];
  for (int i = 0; i < d; ++i) y0[d + i] = w[i];
  const std::size_t ju0 = 2 * d + static_cast<std::size_t>(d) * d;
  for (int i = 0; i < d; ++i) y0[ju0 + static_cast<std::size_t>(i) * d + i] = 1.0;
  ode_options opt;
  opt.tol = tol;
  ode_solution sol = dp45_integrate(rhs, 0.0, y0, 1.0, opt);
  const vecd& yf = sol.y.back();
  exp_map_result out{vecd(yf.begin(), yf.begin() + d), vecd(yf.begin() + d, yf.begin() + 2 * d),
                     matd(d)};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out.j(i, j) = yf[2 * d + static_cast<std::size_t>(i) * d + j];
  return out;
}

// Boundary-value solve: find w with exp_x0(w) = x1 (Newton iteration on the initial
// velocity, using the variational Jacobian). Returns the final exp-map evaluation.
inline std::pair<vecd, exp_map_result> geodesic_shoot(const conformal_field& field, const vecd& x0,
                                                      const vecd& x1, double tol = 1e-12,
                                                      const geometry_options& gopt = {}) {
  const int d = field.dim();
  vecd w(d);
  for (int i = 0; i < d; ++i) w[i] = x1[i] - x0[i];  // flat-space guess
  exp_map_result r = geodesic_exp_map(field, x0, w, tol, gopt);
  for (int it = 0; it < 50; ++it) {
    vecd miss(d);
    double m2 = 0.0;
    for (int i = 0; i < d; ++i) {
      miss[i] = r.x1[i] - x1[i];
      m2 += miss[i] * miss[i];
    }
    if (std::sqrt(m2) <= 10.0 * tol * (1.0 + norm(x1))) return {w, r};
    vecd dw = solve(r.j, miss);
    for (int i = 0; i < d; ++i) w[i] -= dw[i];
    r = geodesic_exp_map(field, x0, w, tol, gopt);
  }
  throw integration_error("geodesic boundary-value solve failed to converge", 0.0);
}

}  // namespace maup

#endif
