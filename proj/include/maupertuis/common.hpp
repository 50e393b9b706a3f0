// Small dense vector/matrix/tensor types and the error hierarchy shared by all modules.
#ifndef MAUPERTUIS_COMMON_HPP
#define MAUPERTUIS_COMMON_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace maup {

using vecd = std::vector<double>;

inline double dot(const vecd& a, const vecd& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const vecd& a) { return std::sqrt(dot(a, a)); }

inline vecd scaled(const vecd& a, double c) {
  vecd r(a);
  for (double& v : r) v *= c;
  return r;
}

inline vecd axpy(double c, const vecd& x, const vecd& y) {  // c*x + y
  vecd r(y);
  for (std::size_t i = 0; i < x.size(); ++i) r[i] += c * x[i];
  return r;
}

// Square matrix, row-major flat storage; dimensions here never exceed ~10.
class matd {
 public:
  matd() = default;
  explicit matd(int n, double fill = 0.0) : n_(n), a_(static_cast<std::size_t>(n) * n, fill) {}
  int dim() const { return n_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  static matd identity(int n) {
    matd m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  double trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }
  double frobenius_sq() const {
    double t = 0.0;
    for (double v : a_) t += v * v;
    return t;
  }

 private:
  int n_ = 0;
  vecd a_;
};

// Rank-3 tensor indexed (i,j,k), all ranges equal to dim.
class tensor3 {
 public:
  tensor3() = default;
  explicit tensor3(int n) : n_(n), a_(static_cast<std::size_t>(n) * n * n, 0.0) {}
  int dim() const { return n_; }
  double& operator()(int i, int j, int k) { return a_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k]; }
  double operator()(int i, int j, int k) const { return a_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k]; }

 private:
  int n_ = 0;
  vecd a_;
};

class tensor4 {
 public:
  tensor4() = default;
  explicit tensor4(int n) : n_(n), a_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}
  int dim() const { return n_; }
  double& operator()(int i, int j, int k, int l) {
    return a_[((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l];
  }
  double operator()(int i, int j, int k, int l) const {
    return a_[((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l];
  }

 private:
  int n_ = 0;
  vecd a_;
};

// Gaussian elimination with partial pivoting; returns det and (optionally) solves A x = b in place.
inline double lu_det_solve(matd a, vecd* b = nullptr) {
  const int n = a.dim();
  double det = 1.0;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(a(i, k)) > std::fabs(a(piv, k))) piv = i;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      if (b) std::swap((*b)[k], (*b)[piv]);
      det = -det;
    }
    const double akk = a(k, k);
    det *= akk;
    if (akk == 0.0) return 0.0;
    for (int i = k + 1; i < n; ++i) {
      const double f = a(i, k) / akk;
      a(i, k) = f;
      for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
      if (b) (*b)[i] -= f * (*b)[k];
    }
  }
  if (b) {
    for (int i = n - 1; i >= 0; --i) {
      double s = (*b)[i];
      for (int j = i + 1; j < n; ++j) s -= a(i, j) * (*b)[j];
      (*b)[i] = s / a(i, i);
    }
  }
  return det;
}

inline double det(const matd& a) { return lu_det_solve(a); }

inline vecd solve(const matd& a, vecd b) {
  lu_det_solve(a, &b);
  return b;
}

// ---------------------------------------------------------------------------
// Errors

// Requested operation needs 2M(V - E) > 0 but the point sits on the wrong side.
class forbidden_region_error : public std::runtime_error {
 public:
  forbidden_region_error(const std::string& what, double energy_gap)
      : std::runtime_error(what), energy_gap_(energy_gap) {}
  double energy_gap() const { return energy_gap_; }  // value of E - V at the offending point

 private:
  double energy_gap_;
};

// Potential (or interpolant) produced a non-finite value.
class evaluation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gamma evaluated at a non-positive integer argument.
class pole_error : public std::runtime_error {
 public:
  pole_error(const std::string& what, double argument)
      : std::runtime_error(what), argument_(argument) {}
  double argument() const { return argument_; }

 private:
  double argument_;
};

// Scenario/schema violation; message carries the JSON path of the offending key.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Step-size underflow or solver breakdown; carries the last good parameter value.
class integration_error : public std::runtime_error {
 public:
  integration_error(const std::string& what, double last_param)
      : std::runtime_error(what), last_param_(last_param) {}
  double last_param() const { return last_param_; }

 private:
  double last_param_;
};

// Spectral-oracle grid failure (wall leakage, non-convergence).
class oracle_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace maup

#endif
