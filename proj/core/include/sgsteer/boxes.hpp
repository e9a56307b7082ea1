#pragma once

// Two-box (path x spin) model of the split single-particle state.
//
// Basis ordering: index = 2 * path + spin with path {Paris = 0, Tokyo = 1}
// and spin {up_z = 0, down_z = 1}.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "sgsteer/measurement.hpp"
#include "sgsteer/numerics.hpp"

namespace sgsteer {

using Vector4c = Eigen::Matrix<Complex, 4, 1>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;
using Matrix2c = Eigen::Matrix<Complex, 2, 2>;

enum BoxBasis : int { kParisUp = 0, kParisDown = 1, kTokyoUp = 2, kTokyoDown = 3 };

struct PathSpinState {
  Vector4c amplitudes = Vector4c::Zero();

  double norm() const { return amplitudes.norm(); }
  /// Throws std::invalid_argument unless the norm is 1 within 1e-12.
  void validate() const;
};

/// c0 (|Paris>|up> + |Tokyo>|down>) with c0 = 1/sqrt(2).
PathSpinState make_psi2();

/// Normalised product of a path vector (Paris, Tokyo) and a spin vector (up_z, down_z).
PathSpinState product_state(const Eigen::Vector2cd& path, const Eigen::Vector2cd& spin);

class DensityMatrix4 {
 public:
  DensityMatrix4() : rho_(Matrix4c::Zero()) {}
  explicit DensityMatrix4(const Matrix4c& rho) : rho_(rho) {}

  static DensityMatrix4 pure(const PathSpinState& state);

  const Matrix4c& matrix() const { return rho_; }
  double trace() const { return rho_.trace().real(); }
  double purity() const { return (rho_ * rho_).trace().real(); }
  double hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }
  double min_eigenvalue() const;

  /// Path marginal (spin traced out), basis {Paris, Tokyo}.
  Matrix2c path_marginal() const;
  /// Spin marginal (path traced out), basis {up_z, down_z}.
  Matrix2c spin_marginal() const;

 private:
  Matrix4c rho_;
};

struct Projection {
  double probability = 0.0;
  /// Empty when the outcome has zero probability.
  std::optional<PathSpinState> state;
};

/// Projector of a box-model outcome. Settings: position (path), spin-z, spin-x.
Matrix4c box_projector(Setting setting, OutcomeLabel label);

/// Born probability and renormalised post-measurement state.
Projection project(const PathSpinState& state, Setting setting, OutcomeLabel label);

struct AssemblageMember {
  OutcomeLabel label;
  double probability = 0.0;
  /// Normalised post-measurement state; zero matrix when probability is 0.
  DensityMatrix4 state;
};

struct Assemblage {
  Setting setting = Setting::kSpinZ;
  std::vector<AssemblageMember> members;

  /// sum_a p(a) rho_a
  DensityMatrix4 average() const;
};

/// Outcome labels of a box-model setting, in assemblage order.
std::vector<OutcomeLabel> box_outcomes(Setting setting);

Assemblage assemblage(const PathSpinState& state, Setting setting);

/// Largest entrywise difference between the path marginals of the averaged
/// assemblages, over all pairs. Requires at least two assemblages.
double nonsignaling_deviation(const std::vector<Assemblage>& assemblages);

/// nonsignaling_deviation over the assemblages of the given settings.
double nonsignaling_check(const PathSpinState& state, const std::vector<Setting>& settings);

/// Same comparison on the full 4x4 averages instead of the path marginals.
/// Informational: a spin-x measurement leaves path coherence in the full
/// average that the position measurement removes.
double full_state_average_deviation(const std::vector<Assemblage>& assemblages);

/// (1/2) sum |eigenvalues(rho - sigma)|.
double trace_distance(const DensityMatrix4& rho, const DensityMatrix4& sigma);

struct Distinguishability {
  /// max over members of a1 of the distance to the closest member of a2.
  double value = 0.0;
  /// matrix[i][j] = trace distance between member i of a1 and member j of a2.
  std::vector<std::vector<double>> matrix;
};

/// Zero-probability members are skipped (their rows/columns hold NaN).
Distinguishability steering_distinguishability(const Assemblage& a1, const Assemblage& a2);

/// Label of a post-measurement box state in the vocabulary of the continuous
/// model: the form follows the setting, location and spin are read off the
/// amplitudes.
StateLabel box_state_label(const PathSpinState& state, Setting setting);

}  // namespace sgsteer
