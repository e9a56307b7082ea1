#pragma once

// Entangled Stern-Gerlach spinor wavefunction.
//
// Sign conventions used throughout the library:
//
//   branch   spin   centre              mean p_z      side
//   kPlus    up_z   -t^2 mu_c b / 2m    -mu_c b t     Paris (Bob)
//   kMinus   down_z +t^2 mu_c b / 2m    +mu_c b t     Tokyo (Alice)
//
// The complex width is A(t) = sigma0^2 + i t hbar / 2m for both branches.

#include <utility>

#include "sgsteer/numerics.hpp"

namespace sgsteer {

/// How the y-dependent phase factor of the transverse envelope is evaluated
/// when k_y != 0. kVerbatim uses exp(y sigma0^2 k_y / (sigma0^2 + t hbar/2m)),
/// kCorrected uses exp(i y sigma0^2 k_y / A(t)), which is what free evolution
/// of exp(-y^2/4 sigma0^2 + i k_y y) produces. Both coincide at k_y = 0.
enum class TransversePhase { kVerbatim, kCorrected };

struct PhysParams {
  double mu_c = 1.0;
  double b = 1.0;
  double B0 = 0.0;
  double m = 1.0;
  double sigma0 = 1.0;
  double hbar = 1.0;
  double k_y = 0.0;
  TransversePhase transverse_phase = TransversePhase::kVerbatim;

  /// Throws std::invalid_argument unless m, sigma0, hbar > 0 and every field
  /// is finite.
  void validate() const;

  /// Silver-atom-like SI magnitudes (Bohr magneton, 10 T/cm gradient,
  /// Ag-108 mass, 30 um initial width).
  static PhysParams silver_preset();
};

enum class Branch { kPlus, kMinus };

inline constexpr double branch_sign(Branch branch) { return branch == Branch::kPlus ? 1.0 : -1.0; }

struct SpinorAmplitude {
  Complex up;
  Complex down;

  double density() const { return std::norm(up) + std::norm(down); }
};

struct BranchGeometry {
  double center_z = 0.0;
  double mean_momentum_z = 0.0;
  Complex complex_width;
  Complex global_phase{1.0, 0.0};
};

struct BranchPair {
  BranchGeometry plus;
  BranchGeometry minus;

  const BranchGeometry& operator[](Branch branch) const {
    return branch == Branch::kPlus ? plus : minus;
  }
};

Complex complex_width(double t, const PhysParams& p);

/// Displacement magnitude t^2 mu_c b / 2m of each branch.
double branch_displacement(double t, const PhysParams& p);

double branch_center(Branch branch, double t, const PhysParams& p);
double branch_mean_momentum(Branch branch, double t, const PhysParams& p);

/// Standard deviation of |phi|^2 in z: |A| / sigma0.
double branch_position_std(double t, const PhysParams& p);

/// Standard deviation of the branch momentum density: hbar / 2 sigma0.
double branch_momentum_std(const PhysParams& p);

BranchPair branch_kinematics(double t, const PhysParams& p);

/// The unnormalised branch expression
///   exp(-/+ i t mu_c (B0 + b z) / hbar) exp(-(z +/- t^2 mu_c b / 2m)^2 / 4A).
Complex branch_phi_raw(Branch branch, double z, double t, const PhysParams& p);

/// L2 norm of branch_phi_raw over z: (sqrt(2 pi) |A| / sigma0)^(1/2).
double branch_raw_norm(double t, const PhysParams& p);

/// Unit-normalised branch amplitude.
Complex branch_phi(Branch branch, double z, double t, const PhysParams& p);

/// The branch as a Gaussian1D (constant phase factor excluded).
Gaussian1D branch_gaussian(Branch branch, double t, const PhysParams& p);

/// <phi_+|phi_-> of the unit-normalised branches.
Complex branch_overlap(double t, const PhysParams& p);

/// Prefactor C0(t) exactly as written for the 3-D state.
Complex c0_prefactor(double t, const PhysParams& p);

/// Transverse envelope M(x, y).
Complex transverse_factor(double x, double y, double t, const PhysParams& p);

/// Integral of |M|^2 over the (x, y) plane.
double transverse_norm_sq(double t, const PhysParams& p);

/// Full 3-D spinor, renormalised so the state has unit norm for any k_y and
/// transverse phase convention.
SpinorAmplitude evaluate_state(double x, double y, double z, double t, const PhysParams& p);

/// Normalisation bookkeeping: the written prefactor versus the one that
/// actually normalises the state, plus the constants of the collapsed forms.
struct NormalizationReport {
  Complex c0_written;
  Complex c0_normalized;
  double relative_deviation = 0.0;  ///< |c0_normalized / c0_written - 1|
  double single_branch_constant = 0.0;
  double superposition_plus_constant = 0.0;
  double superposition_minus_constant = 0.0;  ///< +inf when (phi_+ - phi_-) vanishes
};

NormalizationReport normalization_report(double t, const PhysParams& p);

/// Fourier transform of branch_phi with kernel exp(-i p z / hbar) / sqrt(2 pi hbar).
Complex momentum_amplitude(Branch branch, double p_z, double t, const PhysParams& p);

double momentum_pdf(Branch branch, double p_z, double t, const PhysParams& p);

struct PositionPdf {
  double total = 0.0;
  double up = 0.0;
  double down = 0.0;
};

/// z-marginal of the state, resolved by spin.
PositionPdf position_pdf_z(double z, double t, const PhysParams& p);

/// Two-component z-restricted solution used by the residual diagnostic: the
/// branch expressions times the 1-D share of C0, i.e.
/// exp(-i t^3 mu_c^2 b^2 / 6 m hbar) (1/sqrt 2) (sigma0 / sqrt(2 pi))^(1/2) A^(-1/2).
SpinorAmplitude state_1d(double z, double t, const PhysParams& p);

struct ZGrid {
  double z_min = -10.0;
  double z_max = 10.0;
  int points = 256;
};

/// Grid covering both branches out to 12 standard deviations.
ZGrid default_residual_grid(double t, const PhysParams& p, int points);

/// Relative residual ||i hbar d/dt psi - H psi|| / ||H psi|| of state_1d on a
/// uniform grid, H = p_z^2 / 2m + mu_c (B0 + b z) sigma_z. Derivatives use
/// fourth-order central differences. Throws std::domain_error for fewer than
/// 64 grid points or t <= 0.
double schrodinger_residual(double t, const ZGrid& grid, const PhysParams& p);

}  // namespace sgsteer
