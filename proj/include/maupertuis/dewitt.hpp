// Short-distance expansion machinery: heat-kernel coefficients a1/a2, the endpoint
// expansion of the square-root Morette-van Vleck determinant, a direct numeric
// van Vleck determinant through the variational flow, and the resolvent diagonal
// on the Omega^2 > 0 side.
#ifndef MAUPERTUIS_DEWITT_HPP
#define MAUPERTUIS_DEWITT_HPP

#include <cmath>
#include <vector>

#include "maupertuis/common.hpp"
#include "maupertuis/dynamics.hpp"
#include "maupertuis/geometry.hpp"
#include "maupertuis/special.hpp"

namespace maup {

inline double coefficient_a1(double r, double xi) { return (1.0 / 6.0 - xi) * r; }

inline double coefficient_a2(const curvature_pack& p, double xi) {
  const double c = 1.0 / 6.0 - xi;
  return (1.0 / 6.0) * (0.2 - xi) * p.box_r + 0.5 * c * c * p.r * p.r - p.ricci_sq / 180.0 +
         p.riemann_sq / 180.0;
}

// ---------------------------------------------------------------------------
// Curvature tensor bundle at a point (for the endpoint expansion)

struct curvature_tensors {
  int dim;
  double omega2;   // metric = omega2 * delta
  matd ric;        // Ricci, both indices down
  tensor4 riem;    // mixed R_{m n l}^{~~~ s} (derivative-index-first ordering)
  tensor3 ric_d;   // (m,n,r) = covariant d_r Ric_{mn}
  tensor4 ric_dd;  // (m,n,r,t) = covariant d_t d_r Ric_{mn}
};

// Ricci (lower indices) from the FD Riemann assembly at y.
inline matd ricci_lower_fd(const conformal_field& field, const vecd& y,
                           const geometry_options& opt) {
  return ricci_from_riemann(riemann_mixed_fd(field, y, opt));
}

// Assembles Ricci plus its first and second covariant derivatives. Partial
// derivatives of the Ricci field use central differences at cov_step; the connection
// and its derivative are analytic in the factor jet.
inline curvature_tensors curvature_tensors_at(const conformal_field& field, const vecd& x,
                                              const geometry_options& opt = {},
                                              double cov_step = 5e-3) {
  const int d = field.dim();
  curvature_tensors ct{d, 0.0, matd(d), riemann_mixed_fd(field, x, opt), tensor3(d), tensor4(d)};
  ct.omega2 = std::fabs(field.omega2(x));
  ct.ric = ricci_from_riemann(ct.riem);

  conformal_point pt = analyze(field, x, opt);
  tensor3 gamma = christoffels(pt);
  factor_point fp = factor_at(field, x, true, opt.delta_min);
  // dgamma(r; m,n,l) = d_r Gamma_{mn}^l, analytic
  auto dgamma = [&](int r, int m, int n, int l) {
    double v = 0.0;
    if (n == l) v += fp.b(r, m);
    if (m == l) v += fp.b(r, n);
    if (m == n) v -= fp.b(r, l);
    return v;
  };

  const double h = cov_step;
  std::vector<matd> ric_p(d), ric_m(d);  // Ricci at x +- h e_r
  for (int r = 0; r < d; ++r) {
    vecd xp = x, xm = x;
    xp[r] += h;
    xm[r] -= h;
    ric_p[r] = ricci_lower_fd(field, xp, opt);
    ric_m[r] = ricci_lower_fd(field, xm, opt);
  }
  tensor3 dric(d);  // partial d_r Ric_{mn}
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int r = 0; r < d; ++r)
        dric(m, n, r) = (ric_p[r](m, n) - ric_m[r](m, n)) / (2.0 * h);

  // second partials d_t d_r Ric: diagonal from the 1d stencil, mixed from the 4-point cross
  tensor4 ddric(d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int r = 0; r < d; ++r)
        ddric(m, n, r, r) = (ric_p[r](m, n) - 2.0 * ct.ric(m, n) + ric_m[r](m, n)) / (h * h);
  for (int r = 0; r < d; ++r)
    for (int t = r + 1; t < d; ++t) {
      vecd xpp = x, xpm = x, xmp = x, xmm = x;
      xpp[r] += h; xpp[t] += h;
      xpm[r] += h; xpm[t] -= h;
      xmp[r] -= h; xmp[t] += h;
      xmm[r] -= h; xmm[t] -= h;
      matd rpp = ricci_lower_fd(field, xpp, opt), rpm = ricci_lower_fd(field, xpm, opt);
      matd rmp = ricci_lower_fd(field, xmp, opt), rmm = ricci_lower_fd(field, xmm, opt);
      for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) {
          const double v = (rpp(m, n) - rpm(m, n) - rmp(m, n) + rmm(m, n)) / (4.0 * h * h);
          ddric(m, n, r, t) = v;
          ddric(m, n, t, r) = v;
        }
    }

  // covariant first derivative
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int r = 0; r < d; ++r) {
        double v = dric(m, n, r);
        for (int s = 0; s < d; ++s)
          v -= gamma(r, m, s) * ct.ric(s, n) + gamma(r, n, s) * ct.ric(m, s);
        ct.ric_d(m, n, r) = v;
      }

  // covariant second derivative: d_t (cov d_r Ric)_{mn} - Gamma corrections on all three slots
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int r = 0; r < d; ++r)
        for (int t = 0; t < d; ++t) {
          double v = ddric(m, n, r, t);
          for (int s = 0; s < d; ++s) {
            v -= dgamma(t, r, m, s) * ct.ric(s, n) + gamma(r, m, s) * dric(s, n, t);
            v -= dgamma(t, r, n, s) * ct.ric(m, s) + gamma(r, n, s) * dric(m, s, t);
          }
          for (int s = 0; s < d; ++s) {
            v -= gamma(t, r, s) * ct.ric_d(m, n, s);
            v -= gamma(t, m, s) * ct.ric_d(s, n, r);
            v -= gamma(t, n, s) * ct.ric_d(m, s, r);
          }
          ct.ric_dd(m, n, r, t) = v;
        }
  return ct;
}

// ---------------------------------------------------------------------------
// Endpoint expansion of Delta_MV^{1/2}

// sigma is the contravariant endpoint vector: -(exp_x^{-1} x'), i.e. x - x' in flat space.
// Delta^{1/2} = 1 + (1/12) R_{mn} s^m s^n - (1/24) R_{mn;r} s^m s^n s^r
//             + [ (1/288) R_{mn} R_{rt} + (1/360) R^a_m^b_n R_{arbt} + (1/80) R_{mn;rt} ] s^m s^n s^r s^t.
inline double mv_sqrt_expansion(const vecd& sigma, const curvature_tensors& ct) {
  const int d = ct.dim;
  double q_ric = 0.0;  // R_{mn} s^m s^n
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) q_ric += ct.ric(m, n) * sigma[m] * sigma[n];
  double cubic = 0.0;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int r = 0; r < d; ++r)
        cubic += ct.ric_d(m, n, r) * sigma[m] * sigma[n] * sigma[r];
  // C_{ab} = R_{a r b t} s^r s^t (all indices down); the mixed store has the derivative
  // indices first, so R_{arbt} = omega2 * riem(b, t, r, a).
  matd c(d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      double v = 0.0;
      for (int r = 0; r < d; ++r)
        for (int t = 0; t < d; ++t) v += ct.riem(b, t, r, a) * sigma[r] * sigma[t];
      c(a, b) = ct.omega2 * v;
    }
  double riem_sq_c = 0.0;  // C^{ab} C_{ab} = Omega^{-4} sum C_{ab}^2
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) riem_sq_c += c(a, b) * c(a, b);
  riem_sq_c /= ct.omega2 * ct.omega2 * ct.omega2 * ct.omega2;
  double quartic_dd = 0.0;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int r = 0; r < d; ++r)
        for (int t = 0; t < d; ++t)
          quartic_dd += ct.ric_dd(m, n, r, t) * sigma[m] * sigma[n] * sigma[r] * sigma[t];
  return 1.0 + q_ric / 12.0 - cubic / 24.0 + q_ric * q_ric / 288.0 + riem_sq_c / 360.0 +
         quartic_dd / 80.0;
}

// Truncations of the same series, for order-of-agreement studies.
inline double mv_sqrt_quadratic(const vecd& sigma, const curvature_tensors& ct) {
  const int d = ct.dim;
  double q = 0.0;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) q += ct.ric(m, n) * sigma[m] * sigma[n];
  return 1.0 + q / 12.0;
}

inline double mv_sqrt_cubic(const vecd& sigma, const curvature_tensors& ct) {
  const int d = ct.dim;
  double cubic = 0.0;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int r = 0; r < d; ++r)
        cubic += ct.ric_d(m, n, r) * sigma[m] * sigma[n] * sigma[r];
  return mv_sqrt_quadratic(sigma, ct) - cubic / 24.0;
}

// Direct numeric Delta_MV^{1/2}(x, exp_x(w)) through the Jacobian of the exponential
// map: Delta = sqrt(g(x))/(sqrt(g(x')) det J), J = d exp_x(w)/dw from the variational flow.
inline double van_vleck_numeric(const conformal_field& field, const vecd& x, const vecd& w,
                                double tol = 1e-12, const geometry_options& gopt = {}) {
  exp_map_result r = geodesic_exp_map(field, x, w, tol, gopt);
  const double g0 = std::fabs(field.omega2(x));
  const double g1 = std::fabs(field.omega2(r.x1));
  const double delta = std::pow(g0 / g1, 0.5 * field.dim()) / det(r.j);
  return std::sqrt(delta);
}

// ---------------------------------------------------------------------------
// Resolvent diagonal (V > E side)

struct resolvent_terms {
  std::vector<double> terms;
  double total;
};

// <x|R|x> = (M/2 pi hbar^2)^{D/2} [ G(1-D/2) (V-E)^{D/2} m2^{D/2-1}
//            - (hbar^2/12M) G(3-D/2) lap V (V-E)^{D/2-2} m2^{D/2-3}
//            + (hbar^2/24M) G(4-D/2) grad V . grad V (V-E)^{D/2-3} m2^{D/2-4} ].
// The 1/12 and 1/24 constants already carry the conformal weight xi = (D-2)/(4(D-1)).
// Gamma poles at even D raise pole_error naming the offending argument.
inline resolvent_terms resolvent_diagonal(const potential& pot, double energy, const vecd& x,
                                          int order = 2, double m2 = 1.0) {
  const int d = pot.dim();
  potential_jet j = pot.eval(x);
  const double w = j.value - energy;
  if (w <= 0.0)
    throw forbidden_region_error(
        "resolvent diagonal needs V > E; use the density module's continuation on the allowed side",
        energy - j.value);
  const double m = pot.mass(), hb2 = pot.hbar() * pot.hbar();
  const double hd = 0.5 * d;
  const double pref = std::pow(m / (2.0 * M_PI * hb2), hd);
  double lap = 0.0;
  for (int i = 0; i < d; ++i) lap += j.hess(i, i);
  const double grad2 = dot(j.grad, j.grad);

  resolvent_terms out{{}, 0.0};
  out.terms.push_back(pref * gamma_strict(1.0 - hd) * std::pow(w, hd) * std::pow(m2, hd - 1.0));
  if (order >= 1)
    out.terms.push_back(-pref * (hb2 / (12.0 * m)) * gamma_strict(3.0 - hd) * lap *
                        std::pow(w, hd - 2.0) * std::pow(m2, hd - 3.0));
  if (order >= 2)
    out.terms.push_back(pref * (hb2 / (24.0 * m)) * gamma_strict(4.0 - hd) * grad2 *
                        std::pow(w, hd - 3.0) * std::pow(m2, hd - 4.0));
  for (double t : out.terms) out.total += t;
  return out;
}

}  // namespace maup

#endif
