#pragma once

// Independent reference computations for the test suites. Nothing here calls
// the closed forms under test; everything is brute force (quadrature, grid
// search, finite differences) or a separately derived formula.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "sgsteer/numerics.hpp"
#include "sgsteer/wavefunction.hpp"

namespace sgsteer::oracle {

inline constexpr double kPi = std::numbers::pi;

/// Branch expression typed in directly from the wavefunction formula. sign = +1
/// for the up branch, -1 for the down branch. Not normalised.
inline Complex written_branch(int sign, double z, double t, const PhysParams& p) {
  const Complex a{p.sigma0 * p.sigma0, t * p.hbar / (2.0 * p.m)};
  const double shift = t * t * p.mu_c * p.b / (2.0 * p.m);
  const Complex i{0.0, 1.0};
  const double zs = z + sign * shift;
  return std::exp(-static_cast<double>(sign) * i * t * p.mu_c * (p.B0 + p.b * z) / p.hbar) *
         std::exp(-1.0 / (4.0 * a) * zs * zs);
}

/// |psi_up|^2 + |psi_down|^2 of the full 3-D state at k_y = 0, prefactor
/// typed in as written: exp(-i t^3 mu^2 b^2 / 6 m hbar) (1/sqrt2) (sigma0/sqrt(2 pi))^(3/2) A^(-3/2).
inline double written_density(double x, double y, double z, double t, const PhysParams& p) {
  const Complex i{0.0, 1.0};
  const Complex a{p.sigma0 * p.sigma0, t * p.hbar / (2.0 * p.m)};
  const double mb = p.mu_c * p.b;
  const Complex c0 = std::exp(-i * (t * t * t * mb * mb / (6.0 * p.m * p.hbar))) / std::sqrt(2.0) *
                     std::pow(p.sigma0 / std::sqrt(2.0 * kPi), 1.5) * std::pow(a, -1.5);
  const Complex transverse = std::exp(-(x * x + y * y) / (4.0 * a));
  const Complex up = c0 * transverse * written_branch(+1, z, t, p);
  const Complex down = c0 * transverse * written_branch(-1, z, t, p);
  return std::norm(up) + std::norm(down);
}

/// Integration window wide enough for both branches.
inline QuadratureSpec window(double t, const PhysParams& p, double abs_tol = 1e-13, double rel_tol = 1e-12) {
  const double shift = t * t * std::abs(p.mu_c * p.b) / (2.0 * p.m);
  const double width = std::hypot(p.sigma0 * p.sigma0, t * p.hbar / (2.0 * p.m)) / p.sigma0;
  QuadratureSpec spec;
  spec.lower = -shift - 14.0 * width;
  spec.upper = shift + 14.0 * width;
  spec.abs_tol = abs_tol;
  spec.rel_tol = rel_tol;
  spec.max_subdivisions = 20000;
  return spec;
}

/// <phi_+|phi_-> by quadrature, each branch normalised by quadrature too.
inline Complex overlap_by_quadrature(double t, const PhysParams& p) {
  const auto spec = window(t, p);
  const double n_plus = integrate_real([&](double z) { return std::norm(written_branch(+1, z, t, p)); }, spec);
  const double n_minus = integrate_real([&](double z) { return std::norm(written_branch(-1, z, t, p)); }, spec);
  const Complex raw = integrate_complex(
      [&](double z) { return std::conj(written_branch(+1, z, t, p)) * written_branch(-1, z, t, p); }, spec);
  return raw / std::sqrt(n_plus * n_minus);
}

/// Integral of exp(-(z - c)^2 / 2 + i k z): sqrt(2 pi) exp(i k c - k^2 / 2).
inline Complex shifted_gaussian_with_phase(double c, double k) {
  const Complex i{0.0, 1.0};
  return std::sqrt(2.0 * kPi) * std::exp(i * k * c - k * k / 2.0);
}

/// Separable 3-D norm from three 1-D quadratures through the point (x0, y0, z0):
/// for f = X(x) Y(y) Z(z), int |f|^2 = Ix Iy Iz / |f(x0,y0,z0)|^4.
template <typename F>
double separable_norm(F&& density, double x0, double y0, double z0, const QuadratureSpec& x_spec,
                      const QuadratureSpec& y_spec, const QuadratureSpec& z_spec) {
  const double ix = integrate_real([&](double x) { return density(x, y0, z0); }, x_spec);
  const double iy = integrate_real([&](double y) { return density(x0, y, z0); }, y_spec);
  const double iz = integrate_real([&](double z) { return density(x0, y0, z); }, z_spec);
  const double f0 = density(x0, y0, z0);
  return ix * iy * iz / (f0 * f0);
}

/// Location of the maximum of f on a uniform grid.
template <typename F>
double grid_argmax(F&& f, double lo, double hi, int points, double* step = nullptr) {
  const double h = (hi - lo) / (points - 1);
  if (step != nullptr) *step = h;
  double best_z = lo;
  double best = f(lo);
  for (int i = 1; i < points; ++i) {
    const double z = lo + i * h;
    const double v = f(z);
    if (v > best) {
      best = v;
      best_z = z;
    }
  }
  return best_z;
}

/// Pure-state trace distance sqrt(1 - |<a|b>|^2).
template <typename Vec>
double pure_trace_distance(const Vec& a, const Vec& b) {
  const double overlap = std::norm(a.dot(b));
  return std::sqrt(std::max(0.0, 1.0 - overlap));
}

/// Pearson correlation of two equally long samples.
inline double correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace sgsteer::oracle
