// Potential families with analytic value/gradient/Hessian jets.
// All families are immutable value types; evaluation never mutates.
#ifndef MAUPERTUIS_POTENTIAL_HPP
#define MAUPERTUIS_POTENTIAL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "maupertuis/common.hpp"

namespace maup {

enum class family { free_particle, harmonic, quartic, gaussian_well, coulomb_regularized, tabulated };

inline const char* family_name(family f) {
  switch (f) {
    case family::free_particle: return "free";
    case family::harmonic: return "harmonic";
    case family::quartic: return "quartic";
    case family::gaussian_well: return "gaussian-well";
    case family::coulomb_regularized: return "coulomb-regularized";
    case family::tabulated: return "tabulated";
  }
  return "?";
}

struct potential_jet {
  double value;
  vecd grad;
  matd hess;
};

// Uniformly spaced axis of a rectilinear table.
struct axis_spec {
  double min;
  double step;
  int count;
};

namespace detail {

// Rectilinear table with per-axis local-cubic interpolation (4-point Lagrange
// stencils, one-sided at the edges). Row-major values, last axis fastest.
struct table {
  std::vector<axis_spec> axes;
  vecd values;
  double v_min;
};

// Cubic Lagrange basis on stencil offsets {0,1,2,3}, local coordinate s relative to node 1.
inline void cubic_weights(double s, double h, double w[4], double dw[4], double ddw[4]) {
  static const double c[4][4] = {
      {0.0, -1.0 / 3.0, 0.5, -1.0 / 6.0},  // node at s = -1
      {1.0, -0.5, -1.0, 0.5},              // node at s = 0
      {0.0, 1.0, 0.5, -0.5},               // node at s = 1
      {0.0, -1.0 / 6.0, 0.0, 1.0 / 6.0},   // node at s = 2
  };
  for (int i = 0; i < 4; ++i) {
    w[i] = c[i][0] + s * (c[i][1] + s * (c[i][2] + s * c[i][3]));
    dw[i] = (c[i][1] + s * (2.0 * c[i][2] + s * 3.0 * c[i][3])) / h;
    ddw[i] = (2.0 * c[i][2] + s * 6.0 * c[i][3]) / (h * h);
  }
}

inline potential_jet eval_table(const table& t, const vecd& x) {
  const int d = static_cast<int>(t.axes.size());
  std::vector<int> base(d);
  std::vector<std::array<double, 4>> w(d), dw(d), ddw(d);
  for (int a = 0; a < d; ++a) {
    const axis_spec& ax = t.axes[a];
    const double hi = ax.min + ax.step * (ax.count - 1);
    if (x[a] < ax.min || x[a] > hi) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "tabulated potential: coordinate %d = %g outside [%g, %g]", a,
                    x[a], ax.min, hi);
      throw evaluation_error(buf);
    }
    int cell = static_cast<int>(std::floor((x[a] - ax.min) / ax.step));
    cell = std::clamp(cell, 0, ax.count - 2);
    int j0 = std::clamp(cell - 1, 0, ax.count - 4);
    base[a] = j0;
    const double s = (x[a] - (ax.min + ax.step * (j0 + 1))) / ax.step;
    cubic_weights(s, ax.step, w[a].data(), dw[a].data(), ddw[a].data());
  }
  potential_jet out{0.0, vecd(d, 0.0), matd(d)};
  std::vector<int> k(d, 0);
  std::vector<std::size_t> stride(d, 1);
  for (int a = d - 2; a >= 0; --a)
    stride[a] = stride[a + 1] * static_cast<std::size_t>(t.axes[a + 1].count);
  for (;;) {
    std::size_t idx = 0;
    double wv = 1.0;
    for (int a = 0; a < d; ++a) {
      idx += stride[a] * static_cast<std::size_t>(base[a] + k[a]);
      wv *= w[a][k[a]];
    }
    const double f = t.values[idx];
    out.value += wv * f;
    for (int a = 0; a < d; ++a) {
      double wg = 1.0;
      for (int b = 0; b < d; ++b) wg *= (b == a) ? dw[b][k[b]] : w[b][k[b]];
      out.grad[a] += wg * f;
      for (int b = a; b < d; ++b) {
        double wh = 1.0;
        for (int cax = 0; cax < d; ++cax) {
          if (cax == a && cax == b) wh *= ddw[cax][k[cax]];
          else if (cax == a) wh *= dw[cax][k[cax]];
          else if (cax == b) wh *= dw[cax][k[cax]];
          else wh *= w[cax][k[cax]];
        }
        out.hess(a, b) += wh * f;
      }
    }
    int a = d - 1;
    while (a >= 0 && ++k[a] == 4) k[a--] = 0;
    if (a < 0) break;
  }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < a; ++b) out.hess(a, b) = out.hess(b, a);
  return out;
}

}  // namespace detail

class potential {
 public:
  static potential free_particle(int dim, double mass = 1.0, double hbar = 1.0) {
    return potential(family::free_particle, dim, mass, hbar, {});
  }
  static potential harmonic(int dim, double omega = 1.0, double mass = 1.0, double hbar = 1.0) {
    return potential(family::harmonic, dim, mass, hbar, {omega});
  }
  static potential quartic(int dim, double lambda = 1.0, double mass = 1.0, double hbar = 1.0) {
    return potential(family::quartic, dim, mass, hbar, {lambda});
  }
  static potential gaussian_well(int dim, double depth, double width, double mass = 1.0,
                                 double hbar = 1.0) {
    return potential(family::gaussian_well, dim, mass, hbar, {depth, width});
  }
  static potential coulomb_regularized(int dim, double epsilon = 1e-3, double mass = 1.0,
                                       double hbar = 1.0) {
    return potential(family::coulomb_regularized, dim, mass, hbar, {epsilon});
  }
  static potential tabulated(std::vector<axis_spec> axes, vecd values, double mass = 1.0,
                             double hbar = 1.0) {
    const int dim = static_cast<int>(axes.size());
    std::size_t expect = 1;
    for (const axis_spec& ax : axes) {
      if (ax.count < 4) throw config_error("tabulated potential: every axis needs >= 4 nodes");
      if (ax.step <= 0.0) throw config_error("tabulated potential: axis step must be positive");
      expect *= static_cast<std::size_t>(ax.count);
    }
    if (values.size() != expect)
      throw config_error("tabulated potential: value count does not match grid size");
    potential p(family::tabulated, dim, mass, hbar, {});
    auto t = std::make_shared<detail::table>();
    t->axes = std::move(axes);
    t->v_min = *std::min_element(values.begin(), values.end());
    t->values = std::move(values);
    p.table_ = std::move(t);
    return p;
  }

  family kind() const { return family_; }
  int dim() const { return dim_; }
  double mass() const { return mass_; }
  double hbar() const { return hbar_; }
  const char* name() const { return family_name(family_); }

  // Greatest lower bound of V over its domain (table minimum for tabulated data).
  double lower_bound() const {
    switch (family_) {
      case family::free_particle:
      case family::harmonic:
      case family::quartic: return 0.0;
      case family::gaussian_well: return -params_[0];
      case family::coulomb_regularized: return -1.0 / params_[0];
      case family::tabulated: return table_->v_min;
    }
    return 0.0;
  }

  double value(const vecd& x) const { return eval(x).value; }
  vecd gradient(const vecd& x) const { return eval(x).grad; }
  matd hessian(const vecd& x) const { return eval(x).hess; }

  potential_jet eval(const vecd& x) const {
    if (static_cast<int>(x.size()) != dim_)
      throw evaluation_error("potential evaluated with wrong-dimension point");
    potential_jet j = eval_raw(x);
    check_finite(j, x);
    return j;
  }

 private:
  potential(family f, int dim, double mass, double hbar, vecd params)
      : family_(f), dim_(dim), mass_(mass), hbar_(hbar), params_(std::move(params)) {
    if (dim < 1) throw config_error("potential dimension must be >= 1");
    if (mass <= 0.0) throw config_error("potential mass must be positive");
    if (hbar <= 0.0) throw config_error("potential hbar must be positive");
  }

  potential_jet eval_raw(const vecd& x) const {
    const int d = dim_;
    potential_jet j{0.0, vecd(d, 0.0), matd(d)};
    switch (family_) {
      case family::free_particle:
        return j;
      case family::harmonic: {
        const double k = mass_ * params_[0] * params_[0];
        for (int i = 0; i < d; ++i) {
          j.value += 0.5 * k * x[i] * x[i];
          j.grad[i] = k * x[i];
          j.hess(i, i) = k;
        }
        return j;
      }
      case family::quartic: {
        const double lam = params_[0];
        const double r2 = dot(x, x);
        j.value = lam * r2 * r2;
        for (int i = 0; i < d; ++i) j.grad[i] = 4.0 * lam * r2 * x[i];
        for (int i = 0; i < d; ++i)
          for (int k = 0; k <= i; ++k)
            j.hess(i, k) = j.hess(k, i) =
                4.0 * lam * (r2 * (i == k ? 1.0 : 0.0) + 2.0 * x[i] * x[k]);
        return j;
      }
      case family::gaussian_well: {
        const double depth = params_[0], w2 = params_[1] * params_[1];
        const double r2 = dot(x, x);
        const double v = -depth * std::exp(-0.5 * r2 / w2);
        j.value = v;
        for (int i = 0; i < d; ++i) j.grad[i] = -v * x[i] / w2;
        for (int i = 0; i < d; ++i)
          for (int k = 0; k <= i; ++k)
            j.hess(i, k) = j.hess(k, i) = v * (x[i] * x[k] / w2 - (i == k ? 1.0 : 0.0)) / w2;
        return j;
      }
      case family::coulomb_regularized: {
        const double eps2 = params_[0] * params_[0];
        const double u = dot(x, x) + eps2;
        const double s = std::sqrt(u);
        j.value = -1.0 / s;
        for (int i = 0; i < d; ++i) j.grad[i] = x[i] / (u * s);
        for (int i = 0; i < d; ++i)
          for (int k = 0; k <= i; ++k)
            j.hess(i, k) = j.hess(k, i) = ((i == k ? 1.0 : 0.0) - 3.0 * x[i] * x[k] / u) / (u * s);
        return j;
      }
      case family::tabulated:
        return detail::eval_table(*table_, x);
    }
    return j;
  }

  void check_finite(const potential_jet& j, const vecd& x) const {
    bool ok = std::isfinite(j.value);
    for (int i = 0; ok && i < dim_; ++i) ok = std::isfinite(j.grad[i]);
    for (int i = 0; ok && i < dim_; ++i)
      for (int k = 0; ok && k < dim_; ++k) ok = std::isfinite(j.hess(i, k));
    if (!ok) {
      std::string msg = "potential produced non-finite jet at x = (";
      char buf[32];
      for (int i = 0; i < dim_; ++i) {
        std::snprintf(buf, sizeof buf, "%s%g", i ? ", " : "", x[i]);
        msg += buf;
      }
      msg += ")";
      throw evaluation_error(msg);
    }
  }

  family family_;
  int dim_;
  double mass_;
  double hbar_;
  vecd params_;
  std::shared_ptr<const detail::table> table_;
};

}  // namespace maup

#endif
