// Semiclassical particle density in the classically allowed region: the direct
// reciprocal-Gamma form, the independent continuation route from the resolvent
// series (divide, take the cut discontinuity, reflect the Gammas), the spatial
// integral giving the density of states, and the momentum-space Coulomb case.
#ifndef MAUPERTUIS_DENSITY_HPP
#define MAUPERTUIS_DENSITY_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "maupertuis/common.hpp"
#include "maupertuis/geometry.hpp"
#include "maupertuis/potential.hpp"
#include "maupertuis/special.hpp"

namespace maup {

enum class density_regime { allowed, near_turning, forbidden };

inline const char* regime_name(density_regime r) {
  switch (r) {
    case density_regime::allowed: return "allowed";
    case density_regime::near_turning: return "near-turning";
    default: return "forbidden";
  }
}

struct density_breakdown {
  vecd terms;  // one entry per expansion order retained
  double total = 0.0;
  density_regime regime = density_regime::allowed;
  double truncation_estimate = 0.0;  // magnitude of the last included term
};

// The asymptotic series is non-uniform at turning points; points with
// E - V below turning_fraction * (E - min V) are flagged, not rejected.
inline density_regime classify_regime(double gap, double depth, double turning_fraction) {
  if (gap <= 0.0) return density_regime::forbidden;
  if (depth > 0.0 && gap < turning_fraction * depth) return density_regime::near_turning;
  return density_regime::allowed;
}

namespace detail {

struct density_inputs {
  double hd;     // D/2
  double pref;   // (M / 2 pi hbar^2)^{D/2}
  double w;      // E - V > 0
  double lap;    // tr Hessian of V
  double grad2;  // |grad V|^2
  double hb2_m;  // hbar^2 / M
};

inline density_inputs density_setup(const potential& pot, double energy, const vecd& x) {
  potential_jet j = pot.eval(x);
  const double w = energy - j.value;
  if (w <= 0.0)
    throw forbidden_region_error(
        "density needs E > V(x); use resolvent_diagonal on the V > E side", w);
  const int d = pot.dim();
  const double m = pot.mass(), hb2 = pot.hbar() * pot.hbar();
  density_inputs in;
  in.hd = 0.5 * d;
  in.pref = std::pow(m / (2.0 * M_PI * hb2), in.hd);
  in.w = w;
  in.lap = 0.0;
  for (int i = 0; i < d; ++i) in.lap += j.hess(i, i);
  in.grad2 = dot(j.grad, j.grad);
  in.hb2_m = hb2 / m;
  return in;
}

inline void finish_breakdown(density_breakdown& b) {
  b.total = 0.0;
  for (double t : b.terms) b.total += t;
  b.truncation_estimate = std::fabs(b.terms.back());
}

}  // namespace detail

// rho(x;E) = (M/2 pi hbar^2)^{D/2} [ (E-V)^{D/2-1}/G(D/2)
//            - (hbar^2/12M) lap V (E-V)^{D/2-3}/G(D/2-2)
//            + (hbar^2/24M) |grad V|^2 (E-V)^{D/2-4}/G(D/2-3) ].
// Reciprocal-Gamma poles (even D) make the affected terms exact zeros.
inline density_breakdown semiclassical_density(const potential& pot, double energy, const vecd& x,
                                               int order = 2, double m2 = 1.0,
                                               double turning_fraction = 0.05) {
  detail::density_inputs in = detail::density_setup(pot, energy, x);
  density_breakdown out;
  out.regime = classify_regime(in.w, energy - pot.lower_bound(), turning_fraction);
  out.terms.push_back(in.pref * rgamma(in.hd) * std::pow(in.w, in.hd - 1.0) *
                      std::pow(m2, in.hd - 1.0));
  if (order >= 1)
    out.terms.push_back(-in.pref * (in.hb2_m / 12.0) * in.lap * rgamma(in.hd - 2.0) *
                        std::pow(in.w, in.hd - 3.0) * std::pow(m2, in.hd - 3.0));
  if (order >= 2)
    out.terms.push_back(in.pref * (in.hb2_m / 24.0) * in.grad2 * rgamma(in.hd - 3.0) *
                        std::pow(in.w, in.hd - 4.0) * std::pow(m2, in.hd - 4.0));
  detail::finish_breakdown(out);
  return out;
}

// Same density obtained the long way around, as a cross-check of the direct form:
// start from the V > E resolvent series c_k Gamma(g_k) (V-E)^{D/2 - n_k}, divide by
// 2(V-E), continue with the phases (V-E)^beta = e^{-+ i pi beta} (E-V)^beta, and keep
// the discontinuity across the cut, oriented so the leading term is positive:
//   rho_k = -(1/pi) sin(pi beta_k) Gamma(g_k) c_k (E-V)^{beta_k},   beta_k = -g_k.
// At even D the sine zeros meet Gamma poles; the finite limit is the reflected form
// c_k (E-V)^{beta_k} / Gamma(1 + beta_k). Odd D takes the literal product route.
inline density_breakdown density_from_resolvent(const potential& pot, double energy,
                                                const vecd& x, int order = 2, double m2 = 1.0,
                                                double turning_fraction = 0.05) {
  detail::density_inputs in = detail::density_setup(pot, energy, x);
  density_breakdown out;
  out.regime = classify_regime(in.w, energy - pot.lower_bound(), turning_fraction);
  const double g[3] = {1.0 - in.hd, 3.0 - in.hd, 4.0 - in.hd};
  const double c[3] = {in.pref * std::pow(m2, in.hd - 1.0),
                       -in.pref * (in.hb2_m / 12.0) * in.lap * std::pow(m2, in.hd - 3.0),
                       in.pref * (in.hb2_m / 24.0) * in.grad2 * std::pow(m2, in.hd - 4.0)};
  const int last = std::min(order, 2);
  for (int k = 0; k <= last; ++k) {
    const double beta = -g[k];
    double val;
    if (sinpi(beta) == 0.0 || is_nonpositive_integer(g[k]))
      val = c[k] * rgamma(1.0 + beta) * std::pow(in.w, beta);
    else
      val = -(1.0 / M_PI) * sinpi(beta) * gamma_strict(g[k]) * c[k] * std::pow(in.w, beta);
    out.terms.push_back(val);
  }
  detail::finish_breakdown(out);
  return out;
}

// ---------------------------------------------------------------------------
// Integrated density of states

struct dos_options {
  double bracket_lo = -50.0;  // the allowed region must sit strictly inside the bracket
  double bracket_hi = 50.0;
  int scan_points = 4001;
  int quad_nodes = 256;
  double turning_fraction = 0.05;  // mask for the correction terms
};

struct dos_breakdown {
  vecd terms;  // spatial integral per expansion order
  double total = 0.0;
  double x_left = 0.0, x_right = 0.0;  // turning points
  double mask_lo = 0.0, mask_hi = 0.0;  // correction-term window
  double truncation_estimate = 0.0;     // magnitude of the last included term
};

namespace detail {

inline double bisect_root(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if ((fa <= 0.0) == (fm <= 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
    if (std::fabs(b - a) < 1e-14 * (1.0 + std::fabs(a) + std::fabs(b))) break;
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// g(E) = int rho(x;E) dx over the allowed interval, one dimension. The substitution
// x = mid + halfwidth sin(theta) absorbs the (E-V)^{-1/2} endpoint singularity of the
// leading term; the correction terms are non-integrable at the turning points and are
// integrated only where E - V exceeds the near-turning threshold.
inline dos_breakdown integrated_dos(const potential& pot, double energy, int order = 0,
                                    const dos_options& opt = {}) {
  if (pot.dim() != 1)
    throw config_error("integrated_dos handles one-dimensional potentials; use integrated_dos_box");
  const double lo = opt.bracket_lo, hi = opt.bracket_hi;
  auto vat = [&](double x) { return pot.value(vecd{x}); };
  if (vat(lo) < energy || vat(hi) < energy)
    throw integration_error("allowed region is not enclosed by the bracket; widen it", energy);

  // outermost turning points from a scan plus bisection refinement
  int i_first = -1, i_last = -1;
  double v_min = vat(lo);
  const double dx_scan = (hi - lo) / (opt.scan_points - 1);
  for (int i = 0; i < opt.scan_points; ++i) {
    const double v = vat(lo + i * dx_scan);
    v_min = std::min(v_min, v);
    if (v < energy) {
      if (i_first < 0) i_first = i;
      i_last = i;
    }
  }
  if (i_first < 0)
    throw forbidden_region_error("no classically allowed region at this energy",
                                 energy - v_min);
  auto gap = [&](double x) { return energy - vat(x); };
  dos_breakdown out;
  out.x_left = detail::bisect_root(gap, lo + (i_first - 1) * dx_scan, lo + i_first * dx_scan);
  out.x_right = detail::bisect_root(gap, lo + (i_last + 1) * dx_scan, lo + i_last * dx_scan);

  const double mid = 0.5 * (out.x_left + out.x_right);
  const double halfw = 0.5 * (out.x_right - out.x_left);
  quadrature_rule q = gauss_legendre(opt.quad_nodes);

  double t0 = 0.0;
  for (int i = 0; i < opt.quad_nodes; ++i) {
    const double th = 0.5 * M_PI * q.nodes[i];
    const double x = mid + halfw * std::sin(th);
    density_breakdown b = semiclassical_density(pot, energy, vecd{x}, 0, 1.0,
                                                opt.turning_fraction);
    t0 += q.weights[i] * (0.5 * M_PI) * halfw * std::cos(th) * b.terms[0];
  }
  out.terms.push_back(t0);

  if (order >= 1) {
    // widest theta window around the deepest point where the gap clears the threshold
    const double threshold = opt.turning_fraction * (energy - v_min);
    auto gap_at_theta = [&](double th) { return gap(mid + halfw * std::sin(th)) - threshold; };
    const int n_scan = 2001;
    int j_best = -1;
    double g_best = -1.0;
    for (int j = 0; j < n_scan; ++j) {
      const double th = -0.5 * M_PI + j * (M_PI / (n_scan - 1));
      const double g = gap_at_theta(th);
      if (g > g_best) {
        g_best = g;
        j_best = j;
      }
    }
    if (g_best <= 0.0)
      throw integration_error("near-turning mask leaves no room for correction terms",
                              threshold);
    int j_lo = j_best, j_hi = j_best;
    auto theta_of = [&](int j) { return -0.5 * M_PI + j * (M_PI / (n_scan - 1)); };
    while (j_lo > 0 && gap_at_theta(theta_of(j_lo - 1)) > 0.0) --j_lo;
    while (j_hi < n_scan - 1 && gap_at_theta(theta_of(j_hi + 1)) > 0.0) ++j_hi;
    double th_lo = theta_of(j_lo), th_hi = theta_of(j_hi);
    if (j_lo > 0) th_lo = detail::bisect_root(gap_at_theta, theta_of(j_lo - 1), theta_of(j_lo));
    if (j_hi < n_scan - 1)
      th_hi = detail::bisect_root(gap_at_theta, theta_of(j_hi + 1), theta_of(j_hi));
    out.mask_lo = mid + halfw * std::sin(th_lo);
    out.mask_hi = mid + halfw * std::sin(th_hi);

    vecd acc(order >= 2 ? 2 : 1, 0.0);
    for (int i = 0; i < opt.quad_nodes; ++i) {
      const double th = 0.5 * (th_lo + th_hi) + 0.5 * (th_hi - th_lo) * q.nodes[i];
      const double x = mid + halfw * std::sin(th);
      density_breakdown b = semiclassical_density(pot, energy, vecd{x}, order, 1.0,
                                                  opt.turning_fraction);
      const double jac = q.weights[i] * 0.5 * (th_hi - th_lo) * halfw * std::cos(th);
      acc[0] += jac * b.terms[1];
      if (order >= 2) acc[1] += jac * b.terms[2];
    }
    for (double t : acc) out.terms.push_back(t);
  }
  out.total = 0.0;
  for (double t : out.terms) out.total += t;
  out.truncation_estimate = std::fabs(out.terms.back());
  return out;
}

// Box-quadrature variant for any D: grid nodes are treated as centers of cells of
// volume prod(steps). Correction terms are summed only over cells clear of the
// near-turning band; the leading term is integrable and kept everywhere allowed.
inline density_breakdown integrated_dos_box(const potential& pot, double energy,
                                            const rect_grid& grid, int order = 0,
                                            double turning_fraction = 0.05) {
  if (grid.dim() != pot.dim())
    throw config_error("integration grid dimension does not match the potential");
  double cell = 1.0;
  for (double s : grid.steps) cell *= s;
  density_breakdown out;
  out.terms.assign(std::min(order, 2) + 1, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const vecd x = grid.point(grid.unflatten(i));
    if (energy - pot.value(x) <= 0.0) continue;
    density_breakdown b = semiclassical_density(pot, energy, x, order, 1.0, turning_fraction);
    out.terms[0] += cell * b.terms[0];
    if (b.regime == density_regime::allowed)
      for (std::size_t k = 1; k < b.terms.size(); ++k) out.terms[k] += cell * b.terms[k];
  }
  detail::finish_breakdown(out);
  return out;
}

// ---------------------------------------------------------------------------
// Momentum-space Coulomb case

// The bound-state momentum-space equation is conformally flat with
// g_ij = 2 delta_ij / (p^2 + p_E^2)^2, constant curvature R = 2 D (D-1) p_E^2.
// Its curvature subtraction carries xi = 1/(2D(D-1)); the Weyl-invariant weight
// would be xi = (D-2)/(4(D-1)), i.e. a (D-2)R/(8(D-1)) subtraction (R/16 at D = 3).
struct hydrogen_report {
  int dim;
  double p_e;
  hydrogen_momentum_field field;
  double r;                 // 2 D (D-1) p_E^2
  double xi_used;           // 1/(2 D (D-1)), the weight the momentum-space equation carries
  double xi_weyl;           // (D-2)/(4 (D-1)), the Weyl-invariant weight
  double subtraction_used;  // xi_used * R = p_E^2
  double subtraction_weyl;  // (D-2) R / (8 (D-1))
};

inline hydrogen_report hydrogen_momentum_case(int dim, double p_e) {
  if (dim < 2) throw config_error("momentum-space case needs D >= 2");
  if (!(p_e > 0.0)) throw config_error("momentum-space case needs p_E > 0");
  hydrogen_momentum_field field(dim, p_e);
  const double r = 2.0 * dim * (dim - 1) * p_e * p_e;
  vecd p0(dim, 0.0);
  p0[0] = 0.3 * p_e;
  p0[1] = -0.2 * p_e;
  const double r_fd = ricci_scalar_fd(field, p0);
  if (std::fabs(r_fd - r) > 1e-4 * (1.0 + std::fabs(r)))
    throw oracle_error("constant-curvature check failed for the momentum-space metric");
  const double xi_used = 1.0 / (2.0 * dim * (dim - 1));
  const double xi_weyl_v = weyl_xi(dim);
  return hydrogen_report{dim,     p_e,       field,        r,
                         xi_used, xi_weyl_v, xi_used * r, 0.5 * xi_weyl_v * r};
}

}  // namespace maup

#endif
