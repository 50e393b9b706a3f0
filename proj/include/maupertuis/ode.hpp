// Embedded adaptive Runge-Kutta 5(4) (Dormand-Prince pair, FSAL) with the standard
// fourth-order dense-output interpolant.
#ifndef MAUPERTUIS_ODE_HPP
#define MAUPERTUIS_ODE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "maupertuis/common.hpp"

namespace maup {

using ode_rhs = std::function<void(double t, const vecd& y, vecd& dydt)>;
using ode_stop = std::function<bool(double t, const vecd& y)>;

struct ode_options {
  double tol = 1e-9;        // used as both absolute and relative tolerance
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 2000000;
};

// One accepted step's interpolation polynomial:
// y(t0 + q h) = r1 + q (r2 + (1-q)(r3 + q (r4 + (1-q) r5))).
struct dense_step {
  double t0, h;
  vecd r1, r2, r3, r4, r5;

  void eval(double t, vecd& y) const {
    const double q = (t - t0) / h, u = 1.0 - q;
    y.resize(r1.size());
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] = r1[i] + q * (r2[i] + u * (r3[i] + q * (r4[i] + u * r5[i])));
  }
  void eval_derivative(double t, vecd& dy) const {
    const double q = (t - t0) / h, u = 1.0 - q;
    dy.resize(r1.size());
    for (std::size_t i = 0; i < dy.size(); ++i)
      dy[i] = (r2[i] + (1.0 - 2.0 * q) * r3[i] + q * (2.0 - 3.0 * q) * r4[i] +
               2.0 * q * u * (1.0 - 2.0 * q) * r5[i]) /
              h;
  }
};

struct ode_solution {
  std::vector<double> t;        // accepted nodes, t.front() = t0
  std::vector<vecd> y;          // states at the nodes
  std::vector<dense_step> steps;
  bool truncated = false;       // stop callback fired before t_end
  std::string stop_reason;

  double t_end() const { return t.back(); }

  vecd at(double tq) const {
    vecd out;
    step_for(tq).eval(tq, out);
    return out;
  }
  vecd derivative_at(double tq) const {
    vecd out;
    step_for(tq).eval_derivative(tq, out);
    return out;
  }

 private:
  const dense_step& step_for(double tq) const {
    if (steps.empty()) throw integration_error("dense output requested from empty solution", 0.0);
    // binary search for the step containing tq (monotone t assumed)
    std::size_t lo = 0, hi = steps.size() - 1;
    const bool fwd = steps.front().h > 0.0;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      const double edge = steps[mid].t0 + steps[mid].h;
      if (fwd ? (tq <= edge) : (tq >= edge)) hi = mid;
      else lo = mid + 1;
    }
    return steps[lo];
  }
};

inline ode_solution dp45_integrate(const ode_rhs& rhs, double t0, vecd y0, double t_end,
                                   const ode_options& opt = {}, const ode_stop& stop = nullptr) {
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                      b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static const double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                      d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                      d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  const std::size_t n = y0.size();
  const double dir = (t_end >= t0) ? 1.0 : -1.0;
  const double span = std::fabs(t_end - t0);
  if (span == 0.0) throw integration_error("integration span is zero", t0);

  ode_solution sol;
  sol.t.push_back(t0);
  sol.y.push_back(y0);

  vecd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y1(n), err(n);
  rhs(t0, y0, k1);

  double f0n = 0.0, y0n = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    f0n = std::max(f0n, std::fabs(k1[i]));
    y0n = std::max(y0n, std::fabs(y0[i]));
  }
  double h = dir * std::min({0.01 * (1.0 + y0n) / (1.0 + f0n), span, opt.h_max});

  double t = t0;
  for (long step = 0; step < opt.max_steps; ++step) {
    if (dir * (t - t_end) >= 0.0) return sol;
    if (std::fabs(h) < 1e-14 * std::max(1.0, std::fabs(t)))
      throw integration_error("step size underflow", t);
    if (dir * (t + h - t_end) > 0.0) h = t_end - t;

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y0[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y0[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y0[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y0[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y0[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      y1[i] = y0[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(t + h, y1, k7);

    double err_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = opt.tol * (1.0 + std::max(std::fabs(y0[i]), std::fabs(y1[i])));
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                            e7 * k7[i]);
      err_norm += (e / sc) * (e / sc);
    }
    err_norm = std::sqrt(err_norm / n);

    if (err_norm <= 1.0) {
      dense_step ds;
      ds.t0 = t;
      ds.h = h;
      ds.r1 = y0;
      ds.r2.resize(n);
      ds.r3.resize(n);
      ds.r4.resize(n);
      ds.r5.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double ydiff = y1[i] - y0[i];
        const double bspl = h * k1[i] - ydiff;
        ds.r2[i] = ydiff;
        ds.r3[i] = bspl;
        ds.r4[i] = ydiff - h * k7[i] - bspl;
        ds.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                        d7 * k7[i]);
      }
      sol.steps.push_back(std::move(ds));
      t += h;
      y0 = y1;
      k1 = k7;  // FSAL
      sol.t.push_back(t);
      sol.y.push_back(y0);
      if (stop && stop(t, y0)) {
        sol.truncated = true;
        return sol;
      }
      const double fac = std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
      h = dir * std::min({std::fabs(h) * fac, opt.h_max});
    } else {
      const double fac = std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 1.0);
      h *= fac;
    }
  }
  throw integration_error("maximum step count exceeded", t);
}

}  // namespace maup

#endif
