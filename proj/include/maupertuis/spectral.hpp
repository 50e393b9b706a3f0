// Exact quantum reference: dense diagonalization of the one-dimensional
// Hamiltonian on a uniform Dirichlet grid (3-point Laplacian), plus Gaussian-smeared
// local density and density of states built from the retained eigenpairs.
#ifndef MAUPERTUIS_SPECTRAL_HPP
#define MAUPERTUIS_SPECTRAL_HPP

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "maupertuis/common.hpp"
#include "maupertuis/potential.hpp"

namespace maup {

struct grid_spec {
  double x_min = -12.0;
  double x_max = 12.0;
  int n = 4000;  // interior nodes; Dirichlet zeros sit at x_min and x_max
};

struct spectral_data {
  grid_spec grid;
  double dx = 0.0;
  vecd x;                            // interior nodes
  vecd eigenvalues;                  // ascending
  std::vector<vecd> eigenfunctions;  // per state, sum psi^2 dx = 1
  double leakage = 0.0;              // worst wall amplitude relative to the state's peak

  int retained() const { return static_cast<int>(eigenvalues.size()); }
  double top_energy() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
};

// Lowest n_states eigenpairs of -hbar^2/(2M) d^2/dx^2 + V on the interior grid.
// leak_tol guards against box truncation of decaying states; potentials whose
// eigenfunctions legitimately reach the walls (e.g. V = 0 in a hard box) should
// pass leak_tol = infinity.
inline spectral_data solve_1d(const potential& pot, const grid_spec& grid, int n_states,
                              double leak_tol = 1e-8) {
  if (pot.dim() != 1) throw config_error("spectral solve handles one-dimensional potentials");
  if (grid.n < 3 || grid.x_max <= grid.x_min) throw config_error("degenerate spectral grid");
  if (n_states < 1 || n_states > grid.n) throw config_error("retained state count out of range");

  spectral_data sd;
  sd.grid = grid;
  sd.dx = (grid.x_max - grid.x_min) / (grid.n + 1);
  sd.x.resize(grid.n);
  const double kin = pot.hbar() * pot.hbar() / (pot.mass() * sd.dx * sd.dx);
  vecd diag(grid.n), off(grid.n - 1, -0.5 * kin);
  for (int i = 0; i < grid.n; ++i) {
    sd.x[i] = grid.x_min + (i + 1) * sd.dx;
    diag[i] = kin + pot.value(vecd{sd.x[i]});
  }

  lapack_int m = 0;
  vecd w(grid.n);
  vecd z(static_cast<std::size_t>(grid.n) * n_states);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n_states));
  const lapack_int info = LAPACKE_dstevr(
      LAPACK_COL_MAJOR, 'V', 'I', grid.n, diag.data(), off.data(), 0.0, 0.0, 1, n_states, 0.0,
      &m, w.data(), z.data(), grid.n, isuppz.data());
  if (info != 0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "tridiagonal eigensolver failed (info %d)",
                  static_cast<int>(info));
    throw oracle_error(buf);
  }
  if (m != n_states) throw oracle_error("eigensolver returned fewer states than requested");

  sd.eigenvalues.assign(w.begin(), w.begin() + n_states);
  sd.eigenfunctions.resize(n_states);
  const double scale = 1.0 / std::sqrt(sd.dx);
  for (int s = 0; s < n_states; ++s) {
    vecd& psi = sd.eigenfunctions[s];
    psi.assign(z.begin() + static_cast<std::size_t>(s) * grid.n,
               z.begin() + static_cast<std::size_t>(s + 1) * grid.n);
    // canonical sign: first component of significant magnitude is positive
    double peak = 0.0;
    for (double v : psi) peak = std::max(peak, std::fabs(v));
    for (double v : psi) {
      if (std::fabs(v) > 1e-3 * peak) {
        if (v < 0.0)
          for (double& u : psi) u = -u;
        break;
      }
    }
    const double wall = std::max(std::fabs(psi.front()), std::fabs(psi.back())) / peak;
    sd.leakage = std::max(sd.leakage, wall);
    for (double& u : psi) u *= scale;
  }
  if (sd.leakage > leak_tol) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "wall leakage %.3g exceeds %.3g; enlarge the box",
                  sd.leakage, leak_tol);
    throw oracle_error(buf);
  }
  return sd;
}

// Richardson extrapolation over a x2 grid refinement of the same 3-point scheme;
// cancels the O(dx^2) eigenvalue error.
inline vecd eigenvalues_refined(const potential& pot, const grid_spec& grid, int n_states,
                                double leak_tol = 1e-8) {
  spectral_data coarse = solve_1d(pot, grid, n_states, leak_tol);
  grid_spec fine = grid;
  fine.n = 2 * grid.n + 1;  // halves dx exactly
  spectral_data fined = solve_1d(pot, fine, n_states, leak_tol);
  vecd out(n_states);
  for (int i = 0; i < n_states; ++i)
    out[i] = (4.0 * fined.eigenvalues[i] - coarse.eigenvalues[i]) / 3.0;
  return out;
}

namespace detail {

inline double gaussian_kernel(double t, double eta) {
  return std::exp(-0.5 * t * t / (eta * eta)) / (std::sqrt(2.0 * M_PI) * eta);
}

inline void check_energy_range(const spectral_data& sd, double energy, double eta) {
  if (energy + 3.0 * eta > sd.top_energy()) {
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "energy %g (+3 eta) beyond converged spectral range (top %g)", energy,
                  sd.top_energy());
    throw oracle_error(buf);
  }
}

}  // namespace detail

// psi_n(x) by linear interpolation between grid nodes; zero beyond the walls.
inline double eigenfunction_at(const spectral_data& sd, int state, double x) {
  const vecd& psi = sd.eigenfunctions[state];
  const double s = (x - sd.x.front()) / sd.dx;
  if (s <= -1.0 || s >= static_cast<double>(sd.x.size())) return 0.0;
  const int i = static_cast<int>(std::floor(s));
  const double f = s - i;
  const double lo = (i < 0) ? 0.0 : psi[i];
  const double hi = (i + 1 >= static_cast<int>(psi.size())) ? 0.0 : psi[i + 1];
  return lo + f * (hi - lo);
}

// sum_n |psi_n(x)|^2 N(E - E_n; eta), Gaussian smearing
inline double local_density_smeared(const spectral_data& sd, double x, double energy,
                                    double eta) {
  detail::check_energy_range(sd, energy, eta);
  double acc = 0.0;
  for (int s = 0; s < sd.retained(); ++s) {
    const double p = eigenfunction_at(sd, s, x);
    acc += p * p * detail::gaussian_kernel(energy - sd.eigenvalues[s], eta);
  }
  return acc;
}

// sum_n N(E - E_n; eta)
inline double dos_smeared(const spectral_data& sd, double energy, double eta) {
  detail::check_energy_range(sd, energy, eta);
  double acc = 0.0;
  for (int s = 0; s < sd.retained(); ++s)
    acc += detail::gaussian_kernel(energy - sd.eigenvalues[s], eta);
  return acc;
}

}  // namespace maup

#endif
