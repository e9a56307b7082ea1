#include "sgsteer/wavefunction.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sgsteer {

namespace {

constexpr double kPi = std::numbers::pi;

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("time must be finite and non-negative");
  }
}

}  // namespace

void PhysParams::validate() const {
  const double fields[] = {mu_c, b, B0, m, sigma0, hbar, k_y};
  for (double v : fields) {
    if (!std::isfinite(v)) throw std::invalid_argument("PhysParams: all fields must be finite");
  }
  if (!(m > 0.0)) throw std::invalid_argument("PhysParams: m must be positive");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("PhysParams: sigma0 must be positive");
  if (!(hbar > 0.0)) throw std::invalid_argument("PhysParams: hbar must be positive");
}

PhysParams PhysParams::silver_preset() {
  PhysParams p;
  p.mu_c = 9.2740100783e-24;   // J/T
  p.b = 1.0e3;                 // T/m
  p.B0 = 0.0;                  // T
  p.m = 1.7911e-25;            // kg
  p.sigma0 = 3.0e-5;           // m
  p.hbar = 1.054571817e-34;    // J s
  p.k_y = 0.0;
  return p;
}

Complex complex_width(double t, const PhysParams& p) {
  return {p.sigma0 * p.sigma0, t * p.hbar / (2.0 * p.m)};
}

double branch_displacement(double t, const PhysParams& p) {
  return t * t * p.mu_c * p.b / (2.0 * p.m);
}

double branch_center(Branch branch, double t, const PhysParams& p) {
  return -branch_sign(branch) * branch_displacement(t, p);
}

double branch_mean_momentum(Branch branch, double t, const PhysParams& p) {
  return -branch_sign(branch) * p.mu_c * p.b * t;
}

double branch_position_std(double t, const PhysParams& p) {
  return std::abs(complex_width(t, p)) / p.sigma0;
}

double branch_momentum_std(const PhysParams& p) { return p.hbar / (2.0 * p.sigma0); }

namespace {

Complex constant_phase(Branch branch, double t, const PhysParams& p) {
  return std::exp(-branch_sign(branch) * kI * (t * p.mu_c * p.B0 / p.hbar));
}

}  // namespace

BranchPair branch_kinematics(double t, const PhysParams& p) {
  require_time(t);
  auto make = [&](Branch branch) {
    return BranchGeometry{branch_center(branch, t, p), branch_mean_momentum(branch, t, p),
                          complex_width(t, p), constant_phase(branch, t, p)};
  };
  return {make(Branch::kPlus), make(Branch::kMinus)};
}

Complex branch_phi_raw(Branch branch, double z, double t, const PhysParams& p) {
  const double s = branch_sign(branch);
  const Complex a = complex_width(t, p);
  const double shifted = z + s * branch_displacement(t, p);
  const Complex phase = -s * kI * (t * p.mu_c * (p.B0 + p.b * z) / p.hbar);
  return std::exp(phase - shifted * shifted / (4.0 * a));
}

double branch_raw_norm(double t, const PhysParams& p) {
  return std::sqrt(std::sqrt(2.0 * kPi) * std::abs(complex_width(t, p)) / p.sigma0);
}

Complex branch_phi(Branch branch, double z, double t, const PhysParams& p) {
  require_time(t);
  return branch_phi_raw(branch, z, t, p) / branch_raw_norm(t, p);
}

Gaussian1D branch_gaussian(Branch branch, double t, const PhysParams& p) {
  const double s = branch_sign(branch);
  return {Complex{branch_center(branch, t, p), 0.0}, 1.0 / (4.0 * complex_width(t, p)),
          -s * t * p.mu_c * p.b / p.hbar};
}

Complex branch_overlap(double t, const PhysParams& p) {
  require_time(t);
  const Complex phases =
      std::conj(constant_phase(Branch::kPlus, t, p)) * constant_phase(Branch::kMinus, t, p);
  return phases * gaussian_overlap_analytic(branch_gaussian(Branch::kPlus, t, p),
                                            branch_gaussian(Branch::kMinus, t, p));
}

Complex c0_prefactor(double t, const PhysParams& p) {
  const Complex a = complex_width(t, p);
  const double mb = p.mu_c * p.b;
  const Complex phase = std::exp(-kI * (t * t * t * mb * mb / (6.0 * p.m * p.hbar)));
  const double amplitude = std::pow(p.sigma0 / std::sqrt(2.0 * kPi), 1.5) / std::sqrt(2.0);
  return phase * amplitude * std::pow(a, -1.5);
}

namespace {

// log of the y-dependent part of M, excluding the common exp(-y^2 / 4A).
Complex transverse_y_linear(double y, double t, const PhysParams& p) {
  const double s2 = p.sigma0 * p.sigma0;
  if (p.transverse_phase == TransversePhase::kVerbatim) {
    return Complex{4.0 * y * s2 * p.k_y / (4.0 * (s2 + t * p.hbar / (2.0 * p.m))), 0.0};
  }
  return kI * (4.0 * y * s2 * p.k_y) / (4.0 * complex_width(t, p));
}

}  // namespace

Complex transverse_factor(double x, double y, double t, const PhysParams& p) {
  const Complex a = complex_width(t, p);
  const double s2 = p.sigma0 * p.sigma0;
  const double ky2 = p.k_y * p.k_y;
  const Complex exponent = -s2 * ky2 + transverse_y_linear(y, t, p) -
                           (x * x + y * y - 4.0 * s2 * s2 * ky2) / (4.0 * a);
  return std::exp(exponent);
}

double transverse_norm_sq(double t, const PhysParams& p) {
  const Complex a = complex_width(t, p);
  const double s2 = p.sigma0 * p.sigma0;
  const double ky2 = p.k_y * p.k_y;
  // |exp(-u^2 / 4A)|^2 = exp(-c u^2) with c = Re(1 / 2A).
  const double c = (1.0 / (2.0 * a)).real();
  const double x_part = std::sqrt(kPi / c);

  // |M_y|^2 = exp(-c y^2 + 2 Re(slope) y + g).
  const Complex slope = transverse_y_linear(1.0, t, p);
  const double g = -2.0 * s2 * ky2 + c * 4.0 * s2 * s2 * ky2;
  const double y_part = gaussian_integral(c, 2.0 * slope.real(), g).real();
  return x_part * y_part;
}

namespace {

// Factor multiplying the written C0 so that the 3-D state has unit norm.
double c0_correction(double t, const PhysParams& p) {
  const double raw_norm_sq = branch_raw_norm(t, p) * branch_raw_norm(t, p);
  const double norm_sq = std::norm(c0_prefactor(t, p)) * transverse_norm_sq(t, p) * 2.0 * raw_norm_sq;
  return 1.0 / std::sqrt(norm_sq);
}

}  // namespace

SpinorAmplitude evaluate_state(double x, double y, double z, double t, const PhysParams& p) {
  require_time(t);
  const Complex prefactor = c0_prefactor(t, p) * c0_correction(t, p) * transverse_factor(x, y, t, p);
  return {prefactor * branch_phi_raw(Branch::kPlus, z, t, p),
          prefactor * branch_phi_raw(Branch::kMinus, z, t, p)};
}

NormalizationReport normalization_report(double t, const PhysParams& p) {
  require_time(t);
  NormalizationReport report;
  const double correction = c0_correction(t, p);
  report.c0_written = c0_prefactor(t, p);
  report.c0_normalized = report.c0_written * correction;
  report.relative_deviation = std::abs(correction - 1.0);

  const double base = 1.0 / std::sqrt(transverse_norm_sq(t, p) * std::pow(branch_raw_norm(t, p), 2));
  const double re_overlap = branch_overlap(t, p).real();
  report.single_branch_constant = base;
  report.superposition_plus_constant = base / std::sqrt(2.0 * (1.0 + re_overlap));
  const double minus_weight = 2.0 * (1.0 - re_overlap);
  report.superposition_minus_constant =
      minus_weight > 0.0 ? base / std::sqrt(minus_weight) : std::numeric_limits<double>::infinity();
  return report;
}

Complex momentum_amplitude(Branch branch, double p_z, double t, const PhysParams& p) {
  require_time(t);
  const double s = branch_sign(branch);
  const Complex a = complex_width(t, p);
  const double d = branch_displacement(t, p);
  const double q = p_z / p.hbar + s * t * p.mu_c * p.b / p.hbar;
  const Complex value = constant_phase(branch, t, p) * std::exp(kI * (q * s * d) - a * q * q) *
                        std::sqrt(4.0 * kPi * a) / std::sqrt(2.0 * kPi * p.hbar);
  return value / branch_raw_norm(t, p);
}

double momentum_pdf(Branch branch, double p_z, double t, const PhysParams& p) {
  return std::norm(momentum_amplitude(branch, p_z, t, p));
}

PositionPdf position_pdf_z(double z, double t, const PhysParams& p) {
  require_time(t);
  PositionPdf pdf;
  pdf.up = 0.5 * std::norm(branch_phi(Branch::kPlus, z, t, p));
  pdf.down = 0.5 * std::norm(branch_phi(Branch::kMinus, z, t, p));
  pdf.total = pdf.up + pdf.down;
  return pdf;
}

SpinorAmplitude state_1d(double z, double t, const PhysParams& p) {
  const Complex a = complex_width(t, p);
  const double mb = p.mu_c * p.b;
  const Complex prefactor = std::exp(-kI * (t * t * t * mb * mb / (6.0 * p.m * p.hbar))) *
                            std::sqrt(p.sigma0 / std::sqrt(2.0 * kPi)) / std::sqrt(2.0) /
                            std::sqrt(a);
  return {prefactor * branch_phi_raw(Branch::kPlus, z, t, p),
          prefactor * branch_phi_raw(Branch::kMinus, z, t, p)};
}

ZGrid default_residual_grid(double t, const PhysParams& p, int points) {
  const double reach = branch_displacement(t, p) + kGaussianTailSigmas * branch_position_std(t, p);
  return {-reach, reach, points};
}

double schrodinger_residual(double t, const ZGrid& grid, const PhysParams& p) {
  if (grid.points < 64) {
    throw std::domain_error("schrodinger_residual: grid needs at least 64 points");
  }
  if (!(t > 0.0)) throw std::domain_error("schrodinger_residual: t must be positive");
  if (!(grid.z_min < grid.z_max)) throw std::domain_error("schrodinger_residual: empty grid");
  p.validate();

  const int n = grid.points;
  const double h = (grid.z_max - grid.z_min) / (n - 1);
  // Time step well below the fastest phase rotation on the grid.
  const double z_reach = std::max(std::abs(grid.z_min), std::abs(grid.z_max));
  const double momentum = p.mu_c * p.b * t;
  const double omega = std::max({p.hbar / (2.0 * p.m * p.sigma0 * p.sigma0),
                                 std::abs(p.mu_c) * (std::abs(p.B0) + std::abs(p.b) * z_reach) / p.hbar,
                                 momentum * momentum / (2.0 * p.m * p.hbar)});
  const double dt = 1e-3 / omega;

  std::vector<SpinorAmplitude> psi(n);
  for (int i = 0; i < n; ++i) psi[i] = state_1d(grid.z_min + i * h, t, p);

  double residual_sq = 0.0;
  double reference_sq = 0.0;
  const double kinetic = -p.hbar * p.hbar / (2.0 * p.m);
  for (int i = 2; i < n - 2; ++i) {
    const double z = grid.z_min + i * h;
    const SpinorAmplitude later = state_1d(z, t + dt, p);
    const SpinorAmplitude later2 = state_1d(z, t + 2.0 * dt, p);
    const SpinorAmplitude earlier = state_1d(z, t - dt, p);
    const SpinorAmplitude earlier2 = state_1d(z, t - 2.0 * dt, p);
    const double potential = p.mu_c * (p.B0 + p.b * z);

    auto laplacian = [&](Complex SpinorAmplitude::*c) {
      const Complex f0 = psi[i].*c;
      const Complex fm1 = psi[i - 1].*c;
      const Complex fm2 = psi[i - 2].*c;
      const Complex fp1 = psi[i + 1].*c;
      const Complex fp2 = psi[i + 2].*c;
      return (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
    };
    auto time_derivative = [&](Complex SpinorAmplitude::*c) {
      const Complex em2 = earlier2.*c;
      const Complex em1 = earlier.*c;
      const Complex ep1 = later.*c;
      const Complex ep2 = later2.*c;
      return (em2 - 8.0 * em1 + 8.0 * ep1 - ep2) / (12.0 * dt);
    };

    const Complex h_up = kinetic * laplacian(&SpinorAmplitude::up) + potential * psi[i].up;
    const Complex h_down = kinetic * laplacian(&SpinorAmplitude::down) - potential * psi[i].down;
    const Complex r_up = kI * p.hbar * time_derivative(&SpinorAmplitude::up) - h_up;
    const Complex r_down = kI * p.hbar * time_derivative(&SpinorAmplitude::down) - h_down;

    residual_sq += std::norm(r_up) + std::norm(r_down);
    reference_sq += std::norm(h_up) + std::norm(h_down);
  }
  return std::sqrt(residual_sq / reference_sq);
}

}  // namespace sgsteer
