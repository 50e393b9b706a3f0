// Gamma-function helpers. The reciprocal Gamma is the primitive everywhere below:
// it is entire, so Gamma poles become exact zeros instead of overflow.
#ifndef MAUPERTUIS_SPECIAL_HPP
#define MAUPERTUIS_SPECIAL_HPP

#include <cmath>
#include <cstdio>

#include "maupertuis/common.hpp"

namespace maup {

inline bool is_nonpositive_integer(double z) {
  return z <= 0.0 && z == std::floor(z);
}

// sin(pi z) evaluated through the nearest integer, exact zero at integer z.
inline double sinpi(double z) {
  const double k = std::floor(z + 0.5);  // nearest integer (ties up, irrelevant here)
  const double r = z - k;
  if (r == 0.0) return 0.0;
  const double s = std::sin(M_PI * r);
  return (static_cast<long long>(k) % 2 == 0) ? s : -s;
}

// 1/Gamma(z), entire; exact 0.0 at z = 0, -1, -2, ...
inline double rgamma(double z) {
  if (z >= 0.5) return 1.0 / std::tgamma(z);
  if (is_nonpositive_integer(z)) return 0.0;
  // reflection: 1/Gamma(z) = sin(pi z) Gamma(1-z) / pi, with 1-z >= 0.5
  return sinpi(z) * std::tgamma(1.0 - z) / M_PI;
}

// Gamma(z) for real z; throws pole_error at non-positive integers, naming the argument.
inline double gamma_strict(double z) {
  if (is_nonpositive_integer(z)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "Gamma pole at argument %g", z);
    throw pole_error(buf, z);
  }
  if (z >= 0.5) return std::tgamma(z);
  // reflection from the positive half-line
  return M_PI / (sinpi(z) * std::tgamma(1.0 - z));
}

struct quadrature_rule {
  vecd nodes;    // on [-1, 1]
  vecd weights;
};

// Gauss-Legendre nodes/weights by Newton iteration on the recurrence.
inline quadrature_rule gauss_legendre(int n) {
  quadrature_rule q{vecd(n), vecd(n)};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  return q;
}

}  // namespace maup

#endif
