// Conformally flat geometry engine: g_{mu nu} = Omega^2(x) delta_{mu nu}.
// Christoffels, scalar curvature by three routes (conformal master formula,
// potential-jet closed form, FD Riemann assembly), curvature invariants,
// conformal-Laplacian covariance residual, and flat<->curved solution transfer.
#ifndef MAUPERTUIS_GEOMETRY_HPP
#define MAUPERTUIS_GEOMETRY_HPP

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "maupertuis/common.hpp"
#include "maupertuis/potential.hpp"

namespace maup {

// Conformal factor with first and second derivatives, all of Omega^2 (never of Omega:
// Omega^2 is smooth through the turning surface, Omega is not).
struct factor_jet {
  double omega2;
  vecd grad;
  matd hess;
};

class conformal_field {
 public:
  virtual ~conformal_field() = default;
  virtual int dim() const = 0;
  virtual factor_jet jet(const vecd& x) const = 0;
  double omega2(const vecd& x) const { return jet(x).omega2; }
  // E - V for potential-backed fields; -omega2 otherwise (used in error payloads).
  virtual double energy_gap(double omega2_value) const { return -omega2_value; }
};

// Omega^2 = 2 M (V - E): positive on the classically forbidden side.
class maupertuis_field : public conformal_field {
 public:
  maupertuis_field(potential pot, double energy) : pot_(std::move(pot)), energy_(energy) {}
  int dim() const override { return pot_.dim(); }
  factor_jet jet(const vecd& x) const override {
    potential_jet p = pot_.eval(x);
    const double tm = 2.0 * pot_.mass();
    factor_jet f{tm * (p.value - energy_), p.grad, p.hess};
    for (double& g : f.grad) g *= tm;
    for (int i = 0; i < pot_.dim(); ++i)
      for (int j = 0; j < pot_.dim(); ++j) f.hess(i, j) *= tm;
    return f;
  }
  double energy_gap(double omega2_value) const override {
    return -omega2_value / (2.0 * pot_.mass());
  }
  const potential& pot() const { return pot_; }
  double energy() const { return energy_; }

 private:
  potential pot_;
  double energy_;
};

// Momentum-space bound-state metric g_ij = 2 delta_ij / (p^2 + p_E^2)^2.
class hydrogen_momentum_field : public conformal_field {
 public:
  hydrogen_momentum_field(int dim, double p_e) : dim_(dim), pe2_(p_e * p_e) {}
  int dim() const override { return dim_; }
  factor_jet jet(const vecd& p) const override {
    const double u = dot(p, p) + pe2_;
    factor_jet f{2.0 / (u * u), vecd(dim_, 0.0), matd(dim_)};
    const double u3 = u * u * u, u4 = u3 * u;
    for (int i = 0; i < dim_; ++i) f.grad[i] = -8.0 * p[i] / u3;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        f.hess(i, j) = 48.0 * p[i] * p[j] / u4 - (i == j ? 8.0 / u3 : 0.0);
    return f;
  }

 private:
  int dim_;
  double pe2_;
};

struct geometry_options {
  double delta_min = 1e-6;       // admissibility floor on Omega^2
  double fd_step = 1e-4;         // central-difference step for FD oracles
  double turning_fraction = 0.05;  // |E-V| <= fraction*(E - min V) flags near-turning
};

// Point data of an admissible point: Omega and its derivatives, plus A_mu = d_mu ln(Omega).
struct conformal_point {
  vecd x;
  int dim;
  double omega2;
  double omega;
  vecd d_omega;
  matd dd_omega;
  vecd a;  // grad of log Omega; the only ingredient of the Christoffels
};

inline conformal_point analyze(const conformal_field& field, const vecd& x,
                               const geometry_options& opt = {}) {
  factor_jet f = field.jet(x);
  if (f.omega2 <= opt.delta_min) {
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "point is outside the admissible region: Omega^2 = %g <= %g", f.omega2,
                  opt.delta_min);
    throw forbidden_region_error(buf, field.energy_gap(f.omega2));
  }
  const int d = field.dim();
  conformal_point pt{x, d, f.omega2, std::sqrt(f.omega2), vecd(d), matd(d), vecd(d)};
  for (int i = 0; i < d; ++i) {
    pt.d_omega[i] = f.grad[i] / (2.0 * pt.omega);
    pt.a[i] = f.grad[i] / (2.0 * f.omega2);
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      pt.dd_omega(i, j) = f.hess(i, j) / (2.0 * pt.omega) -
                          f.grad[i] * f.grad[j] / (4.0 * f.omega2 * pt.omega);
  return pt;
}

inline bool near_turning(const potential& pot, double energy, const vecd& x,
                         const geometry_options& opt = {}) {
  const double span = energy - pot.lower_bound();
  return std::fabs(energy - pot.value(x)) <= opt.turning_fraction * std::max(span, 0.0);
}

// ---------------------------------------------------------------------------
// Christoffels

// Gamma_{mu nu}^lambda = delta^l_n A_m + delta^l_m A_n - delta_{mn} A_l; exact symmetry in (mu,nu).
inline tensor3 christoffels(const conformal_point& pt) {
  const int d = pt.dim;
  tensor3 g(d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int l = 0; l < d; ++l) {
        double v = 0.0;
        if (n == l) v += pt.a[m];
        if (m == l) v += pt.a[n];
        if (m == n) v -= pt.a[l];
        g(m, n, l) = v;
      }
  return g;
}

// Same connection from first principles: FD derivatives of g_{mu nu} = Omega^2 delta.
inline tensor3 christoffels_fd_metric(const conformal_field& field, const vecd& x, double h) {
  const int d = field.dim();
  vecd domega2(d);  // FD gradient of Omega^2
  for (int r = 0; r < d; ++r) {
    vecd xp = x, xm = x;
    xp[r] += h;
    xm[r] -= h;
    domega2[r] = (field.omega2(xp) - field.omega2(xm)) / (2.0 * h);
  }
  const double omega2 = field.omega2(x);
  // dg_{mn}/dx^r = domega2[r] delta_{mn}; Gamma = 1/2 g^{ls}(d_m g_{sn} + d_n g_{ms} - d_s g_{mn})
  tensor3 g(d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int l = 0; l < d; ++l) {
        double v = 0.0;
        if (n == l) v += domega2[m];
        if (m == l) v += domega2[n];
        if (m == n) v -= domega2[l];
        g(m, n, l) = v / (2.0 * omega2);
      }
  return g;
}

// ---------------------------------------------------------------------------
// Scalar curvature, three routes

// Conformal master formula with flat background: R = -2(D-1) lap(Omega)/Omega^3
// - (D-1)(D-4) |grad Omega|^2 / Omega^4.
inline double ricci_scalar_conformal(const conformal_point& pt) {
  const int d = pt.dim;
  double lap = 0.0;
  for (int i = 0; i < d; ++i) lap += pt.dd_omega(i, i);
  const double grad2 = dot(pt.d_omega, pt.d_omega);
  const double o3 = pt.omega2 * pt.omega, o4 = pt.omega2 * pt.omega2;
  return -2.0 * (d - 1) * lap / o3 - static_cast<double>(d - 1) * (d - 4) * grad2 / o4;
}

// Closed form in potential jets, valid on the Omega^2 > 0 side (W = V - E > 0):
// R = ((1-D)/4) [ 2 lap V / (M W^2) + (D-6) |grad V|^2 / (2 M W^3) ].
inline double ricci_scalar_analytic(const potential& pot, double energy, const vecd& x,
                                    const geometry_options& opt = {}) {
  potential_jet p = pot.eval(x);
  const double w = p.value - energy;
  const double m = pot.mass();
  if (2.0 * m * w <= opt.delta_min) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "curvature requested outside admissible region: 2M(V-E) = %g",
                  2.0 * m * w);
    throw forbidden_region_error(buf, energy - p.value);
  }
  const int d = pot.dim();
  double lap = 0.0;
  for (int i = 0; i < d; ++i) lap += p.hess(i, i);
  const double grad2 = dot(p.grad, p.grad);
  return 0.25 * (1.0 - d) * (2.0 * lap / (m * w * w) + (d - 6.0) * grad2 / (2.0 * m * w * w * w));
}

// Mixed Riemann R_{mu nu lambda}^{~~~ sigma} from central differences of the analytic
// Christoffel field.
inline tensor4 riemann_mixed_fd(const conformal_field& field, const vecd& x,
                                const geometry_options& opt = {}) {
  const int d = field.dim();
  const double h = opt.fd_step;
  tensor3 gamma0 = christoffels(analyze(field, x, opt));
  std::vector<tensor3> dgamma(d);  // dgamma[r](m,n,l) = d_r Gamma_{mn}^l
  for (int r = 0; r < d; ++r) {
    vecd xp = x, xm = x;
    xp[r] += h;
    xm[r] -= h;
    tensor3 gp = christoffels(analyze(field, xp, opt));
    tensor3 gm = christoffels(analyze(field, xm, opt));
    dgamma[r] = tensor3(d);
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n)
        for (int l = 0; l < d; ++l) dgamma[r](m, n, l) = (gp(m, n, l) - gm(m, n, l)) / (2.0 * h);
  }
  tensor4 riem(d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int l = 0; l < d; ++l)
        for (int s = 0; s < d; ++s) {
          double v = dgamma[m](n, l, s) - dgamma[n](m, l, s);
          for (int t = 0; t < d; ++t)
            v += gamma0(n, l, t) * gamma0(m, t, s) - gamma0(m, l, t) * gamma0(n, t, s);
          riem(m, n, l, s) = v;
        }
  return riem;
}

// Ricci_{lambda nu} = R_{mu nu lambda}^{~~~ mu}.
inline matd ricci_from_riemann(const tensor4& riem) {
  const int d = riem.dim();
  matd ric(d);
  for (int l = 0; l < d; ++l)
    for (int n = 0; n < d; ++n) {
      double v = 0.0;
      for (int m = 0; m < d; ++m) v += riem(m, n, l, m);
      ric(l, n) = v;
    }
  return ric;
}

// Independent curvature route: FD the connection, assemble the Riemann tensor, contract twice.
inline double ricci_scalar_fd(const conformal_field& field, const vecd& x,
                              const geometry_options& opt = {}) {
  tensor4 riem = riemann_mixed_fd(field, x, opt);
  matd ric = ricci_from_riemann(riem);
  const double omega2 = field.omega2(x);
  return ric.trace() / omega2;
}

// ---------------------------------------------------------------------------
// Curvature invariants

struct curvature_pack {
  double r;           // scalar curvature
  double box_r;       // Laplace-Beltrami of R
  double ricci_sq;    // R_{mu nu} R^{mu nu}
  double riemann_sq;  // R_{mu nu rho sigma} R^{mu nu rho sigma}
};

// Laplace-Beltrami of a scalar field: Omega^{-2} [ lap f + (D-2) A . grad f ].
inline double laplace_beltrami_fd(const conformal_field& field,
                                  const std::function<double(const vecd&)>& f, const vecd& x,
                                  double h, const geometry_options& opt = {}) {
  const int d = field.dim();
  const double f0 = f(x);
  double lap = 0.0;
  vecd grad(d);
  for (int i = 0; i < d; ++i) {
    vecd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fp = f(xp), fm = f(xm);
    lap += (fp - 2.0 * f0 + fm) / (h * h);
    grad[i] = (fp - fm) / (2.0 * h);
  }
  conformal_point pt = analyze(field, x, opt);
  return (lap + (d - 2.0) * dot(pt.a, grad)) / pt.omega2;
}

inline curvature_pack curvature_invariants(const conformal_field& field, const vecd& x,
                                           const geometry_options& opt = {}) {
  const int d = field.dim();
  tensor4 riem = riemann_mixed_fd(field, x, opt);
  matd ric = ricci_from_riemann(riem);
  const double omega2 = field.omega2(x);
  curvature_pack pack{};
  pack.r = ric.trace() / omega2;
  pack.ricci_sq = ric.frobenius_sq() / (omega2 * omega2);
  double rr = 0.0;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int l = 0; l < d; ++l)
        for (int s = 0; s < d; ++s) rr += riem(m, n, l, s) * riem(m, n, l, s);
  pack.riemann_sq = rr / (omega2 * omega2);
  // box R from the (analytic-jet) conformal scalar-curvature field
  auto r_field = [&](const vecd& y) { return ricci_scalar_conformal(analyze(field, y, opt)); };
  pack.box_r = laplace_beltrami_fd(field, r_field, x, opt.fd_step, opt);
  return pack;
}

// Largest deviation of a pack from the maximally symmetric relations
// ricci_sq = R^2/D, riemann_sq = 2 R^2/(D(D-1)); a cheap pack sanity check.
inline double max_symmetric_residual(const curvature_pack& p, int d) {
  const double r2 = p.r * p.r;
  return std::max(std::fabs(p.ricci_sq - r2 / d),
                  std::fabs(p.riemann_sq - 2.0 * r2 / (d * (d - 1.0))));
}

// ---------------------------------------------------------------------------
// Conformal (Yamabe) Laplacian

// (D-2)/(4(D-1)); R vanishes identically in one dimension, so the D=1 coefficient is taken as 0.
inline double weyl_xi(int d) { return d == 1 ? 0.0 : (d - 2.0) / (4.0 * (d - 1.0)); }

// residual(f, x) = (lap_g - xi_c R)[Omega^{(2-D)/2} f](x) - Omega^{-(D+2)/2} lap_flat f(x).
// Zero (to stencil order) for any smooth f: the weighted operator is conformally covariant.
inline double yamabe_covariance_residual(const conformal_field& field,
                                         const std::function<double(const vecd&)>& f,
                                         const vecd& x, double h,
                                         const geometry_options& opt = {}) {
  const int d = field.dim();
  const double p = 0.5 * (2.0 - d);
  auto phi = [&](const vecd& y) {
    const double o2 = field.omega2(y);
    if (o2 <= opt.delta_min)
      throw forbidden_region_error("covariance stencil left the admissible region",
                                   field.energy_gap(o2));
    return std::pow(o2, 0.5 * p) * f(y);
  };
  conformal_point pt = analyze(field, x, opt);
  const double phi0 = phi(x);
  double lap_phi = 0.0, lap_f = 0.0;
  vecd grad_phi(d);
  for (int i = 0; i < d; ++i) {
    vecd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double pp = phi(xp), pm = phi(xm);
    lap_phi += (pp - 2.0 * phi0 + pm) / (h * h);
    grad_phi[i] = (pp - pm) / (2.0 * h);
    lap_f += (f(xp) - 2.0 * f(x) + f(xm)) / (h * h);
  }
  const double lap_g = (lap_phi + (d - 2.0) * dot(pt.a, grad_phi)) / pt.omega2;
  const double r = ricci_scalar_conformal(pt);
  return lap_g - weyl_xi(d) * r * phi0 - std::pow(pt.omega2, -0.25 * (d + 2.0)) * lap_f;
}

// ---------------------------------------------------------------------------
// Flat -> curved solution transfer on a rectilinear grid

struct rect_grid {
  vecd mins;
  vecd steps;
  std::vector<int> counts;

  int dim() const { return static_cast<int>(counts.size()); }
  std::size_t size() const {
    std::size_t n = 1;
    for (int c : counts) n *= static_cast<std::size_t>(c);
    return n;
  }
  vecd point(const std::vector<int>& idx) const {
    vecd x(dim());
    for (int a = 0; a < dim(); ++a) x[a] = mins[a] + steps[a] * idx[a];
    return x;
  }
  std::vector<int> unflatten(std::size_t flat) const {
    std::vector<int> idx(dim());
    for (int a = dim() - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(flat % counts[a]);
      flat /= counts[a];
    }
    return idx;
  }
  std::size_t flatten(const std::vector<int>& idx) const {
    std::size_t f = 0;
    for (int a = 0; a < dim(); ++a) f = f * counts[a] + idx[a];
    return f;
  }
};

inline vecd sample_grid(const rect_grid& g, const std::function<double(const vecd&)>& f) {
  vecd out(g.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(g.point(g.unflatten(i)));
  return out;
}

struct transfer_result {
  rect_grid grid;
  vecd flat_residual;    // (-hbar^2/2M lap + V - E) psi at each node
  vecd curved_residual;  // [hbar^2 (lap_g - xi_c R) - 1] (Omega^{(2-D)/2} psi)
  std::vector<char> valid;

  double max_flat() const { return max_over(flat_residual); }
  double max_curved() const { return max_over(curved_residual); }

 private:
  double max_over(const vecd& v) const {
    double m = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (valid[i]) m = std::max(m, std::fabs(v[i]));
    return m;
  }
};

// Transfers grid samples of a flat Schrodinger solution at energy E into the curved
// picture and reports both residual fields. Nodes whose stencil leaves the grid or the
// admissible region are masked out.
inline transfer_result schrodinger_solution_transfer(const potential& pot, double energy,
                                                     const rect_grid& grid, const vecd& psi,
                                                     const geometry_options& opt = {}) {
  const int d = grid.dim();
  if (psi.size() != grid.size())
    throw config_error("solution transfer: psi sample count does not match grid");
  maupertuis_field field(pot, energy);
  const double p = 0.5 * (2.0 - d);
  const double hbar2 = pot.hbar() * pot.hbar();
  const double m = pot.mass();
  const std::size_t n = grid.size();

  // precompute Omega^2 and phi on all nodes; negative factor marks inadmissible
  vecd omega2(n), phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    omega2[i] = field.omega2(grid.point(grid.unflatten(i)));
    phi[i] = omega2[i] > opt.delta_min ? std::pow(omega2[i], 0.5 * p) * psi[i] : 0.0;
  }

  transfer_result out{grid, vecd(n, 0.0), vecd(n, 0.0), std::vector<char>(n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> idx = grid.unflatten(i);
    bool interior = true;
    for (int a = 0; a < d; ++a)
      if (idx[a] == 0 || idx[a] == grid.counts[a] - 1) interior = false;
    if (!interior || omega2[i] <= opt.delta_min) continue;
    bool stencil_ok = true;
    double lap_psi = 0.0, lap_phi = 0.0;
    vecd grad_phi(d);
    for (int a = 0; a < d && stencil_ok; ++a) {
      std::vector<int> ip = idx, im = idx;
      ++ip[a];
      --im[a];
      const std::size_t jp = grid.flatten(ip), jm = grid.flatten(im);
      if (omega2[jp] <= opt.delta_min || omega2[jm] <= opt.delta_min) {
        stencil_ok = false;
        break;
      }
      const double h = grid.steps[a];
      lap_psi += (psi[jp] - 2.0 * psi[i] + psi[jm]) / (h * h);
      lap_phi += (phi[jp] - 2.0 * phi[i] + phi[jm]) / (h * h);
      grad_phi[a] = (phi[jp] - phi[jm]) / (2.0 * h);
    }
    if (!stencil_ok) continue;
    const vecd x = grid.point(idx);
    conformal_point pt = analyze(field, x, opt);
    out.flat_residual[i] = -0.5 * hbar2 / m * lap_psi + (pot.value(x) - energy) * psi[i];
    const double lap_g = (lap_phi + (d - 2.0) * dot(pt.a, grad_phi)) / pt.omega2;
    const double r = ricci_scalar_conformal(pt);
    out.curved_residual[i] = hbar2 * (lap_g - weyl_xi(d) * r * phi[i]) - phi[i];
    out.valid[i] = 1;
  }
  return out;
}

}  // namespace maup

#endif
