#include "sgsteer/boxes.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgsteer {

namespace {

Matrix2c spin_projector(Setting setting, OutcomeLabel label) {
  Matrix2c pi = Matrix2c::Zero();
  const bool plus = label == OutcomeLabel::kPlus;
  if (setting == Setting::kSpinZ) {
    pi(plus ? 0 : 1, plus ? 0 : 1) = 1.0;
  } else {
    const double off = plus ? 0.5 : -0.5;
    pi << 0.5, off, off, 0.5;
  }
  return pi;
}

Matrix4c kron(const Matrix2c& path, const Matrix2c& spin) {
  Matrix4c out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int s = 0; s < 2; ++s)
        for (int r = 0; r < 2; ++r) out(2 * a + s, 2 * b + r) = path(a, b) * spin(s, r);
  return out;
}

}  // namespace

void PathSpinState::validate() const {
  if (std::abs(norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("PathSpinState: amplitudes must have unit norm");
  }
}

PathSpinState make_psi2() {
  PathSpinState psi;
  const double c0 = 1.0 / std::sqrt(2.0);
  psi.amplitudes[kParisUp] = c0;
  psi.amplitudes[kTokyoDown] = c0;
  return psi;
}

PathSpinState product_state(const Eigen::Vector2cd& path, const Eigen::Vector2cd& spin) {
  const double n = path.norm() * spin.norm();
  if (!(n > 0.0)) throw std::invalid_argument("product_state: zero vector");
  PathSpinState psi;
  for (int a = 0; a < 2; ++a)
    for (int s = 0; s < 2; ++s) psi.amplitudes[2 * a + s] = path[a] * spin[s] / n;
  return psi;
}

DensityMatrix4 DensityMatrix4::pure(const PathSpinState& state) {
  return DensityMatrix4(state.amplitudes * state.amplitudes.adjoint());
}

double DensityMatrix4::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(rho_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Matrix2c DensityMatrix4::path_marginal() const {
  Matrix2c out = Matrix2c::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int s = 0; s < 2; ++s) out(a, b) += rho_(2 * a + s, 2 * b + s);
  return out;
}

Matrix2c DensityMatrix4::spin_marginal() const {
  Matrix2c out = Matrix2c::Zero();
  for (int s = 0; s < 2; ++s)
    for (int r = 0; r < 2; ++r)
      for (int a = 0; a < 2; ++a) out(s, r) += rho_(2 * a + s, 2 * a + r);
  return out;
}

std::vector<OutcomeLabel> box_outcomes(Setting setting) {
  switch (setting) {
    case Setting::kPositionZ:
      return {OutcomeLabel::kTokyo, OutcomeLabel::kParis};
    case Setting::kSpinZ:
    case Setting::kSpinX:
      return {OutcomeLabel::kPlus, OutcomeLabel::kMinus};
    case Setting::kMomentumZ:
      break;
  }
  throw std::invalid_argument("box model supports PositionZ, SpinZ and SpinX only");
}

Matrix4c box_projector(Setting setting, OutcomeLabel label) {
  const auto outcomes = box_outcomes(setting);
  if (label != outcomes[0] && label != outcomes[1]) {
    throw std::invalid_argument("box_projector: outcome does not belong to setting");
  }
  if (setting == Setting::kPositionZ) {
    Matrix2c path = Matrix2c::Zero();
    const int index = label == OutcomeLabel::kParis ? 0 : 1;
    path(index, index) = 1.0;
    return kron(path, Matrix2c::Identity());
  }
  return kron(Matrix2c::Identity(), spin_projector(setting, label));
}

Projection project(const PathSpinState& state, Setting setting, OutcomeLabel label) {
  const Vector4c projected = box_projector(setting, label) * state.amplitudes;
  Projection out;
  out.probability = projected.squaredNorm();
  if (out.probability > 0.0) {
    PathSpinState post;
    post.amplitudes = projected / std::sqrt(out.probability);
    out.state = post;
  }
  return out;
}

DensityMatrix4 Assemblage::average() const {
  Matrix4c sum = Matrix4c::Zero();
  for (const auto& member : members) sum += member.probability * member.state.matrix();
  return DensityMatrix4(sum);
}

Assemblage assemblage(const PathSpinState& state, Setting setting) {
  Assemblage out;
  out.setting = setting;
  for (OutcomeLabel label : box_outcomes(setting)) {
    const Projection projection = project(state, setting, label);
    AssemblageMember member{label, projection.probability, DensityMatrix4{}};
    if (projection.state) member.state = DensityMatrix4::pure(*projection.state);
    out.members.push_back(member);
  }
  return out;
}

double nonsignaling_deviation(const std::vector<Assemblage>& assemblages) {
  if (assemblages.size() < 2) throw std::invalid_argument("nonsignaling check needs >= 2 settings");
  std::vector<Matrix2c> marginals;
  for (const auto& a : assemblages) marginals.push_back(a.average().path_marginal());
  double worst = 0.0;
  for (std::size_t i = 0; i < marginals.size(); ++i)
    for (std::size_t j = i + 1; j < marginals.size(); ++j)
      worst = std::max(worst, (marginals[i] - marginals[j]).cwiseAbs().maxCoeff());
  return worst;
}

double nonsignaling_check(const PathSpinState& state, const std::vector<Setting>& settings) {
  std::vector<Assemblage> assemblages;
  for (Setting s : settings) assemblages.push_back(assemblage(state, s));
  return nonsignaling_deviation(assemblages);
}

double full_state_average_deviation(const std::vector<Assemblage>& assemblages) {
  if (assemblages.size() < 2) throw std::invalid_argument("comparison needs >= 2 settings");
  double worst = 0.0;
  for (std::size_t i = 0; i < assemblages.size(); ++i)
    for (std::size_t j = i + 1; j < assemblages.size(); ++j)
      worst = std::max(worst, (assemblages[i].average().matrix() - assemblages[j].average().matrix())
                                  .cwiseAbs()
                                  .maxCoeff());
  return worst;
}

double trace_distance(const DensityMatrix4& rho, const DensityMatrix4& sigma) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(rho.matrix() - sigma.matrix(), Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

Distinguishability steering_distinguishability(const Assemblage& a1, const Assemblage& a2) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Distinguishability out;
  out.matrix.assign(a1.members.size(), std::vector<double>(a2.members.size(), nan));
  for (std::size_t i = 0; i < a1.members.size(); ++i) {
    if (!(a1.members[i].probability > 0.0)) continue;
    double closest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < a2.members.size(); ++j) {
      if (!(a2.members[j].probability > 0.0)) continue;
      out.matrix[i][j] = trace_distance(a1.members[i].state, a2.members[j].state);
      closest = std::min(closest, out.matrix[i][j]);
    }
    if (std::isfinite(closest)) out.value = std::max(out.value, closest);
  }
  return out;
}

StateLabel box_state_label(const PathSpinState& state, Setting setting) {
  constexpr double kTol = 1e-12;
  StateLabel label;
  switch (setting) {
    case Setting::kPositionZ:
      label.form = StateForm::kPositionEigenstate;
      break;
    case Setting::kSpinZ:
      label.form = StateForm::kSingleBranchGaussian;
      break;
    case Setting::kSpinX:
      label.form = StateForm::kBranchSuperposition;
      break;
    case Setting::kMomentumZ:
      throw std::invalid_argument("box model has no momentum setting");
  }

  const DensityMatrix4 rho = DensityMatrix4::pure(state);
  const Matrix2c path = rho.path_marginal();
  const double paris = path(0, 0).real();
  if (paris > 1.0 - kTol) {
    label.location = Location::kParis;
  } else if (paris < kTol) {
    label.location = Location::kTokyo;
  } else {
    label.location = Location::kDelocalized;
  }

  const Matrix2c spin = rho.spin_marginal();
  const double up_z = spin(0, 0).real();
  const double up_x = 0.5 * (spin(0, 0) + spin(1, 1)).real() + spin(0, 1).real();
  if (up_z > 1.0 - kTol) {
    label.spin = SpinLabel::kUpZ;
  } else if (up_z < kTol) {
    label.spin = SpinLabel::kDownZ;
  } else if (up_x > 1.0 - kTol) {
    label.spin = SpinLabel::kUpX;
  } else if (up_x < kTol) {
    label.spin = SpinLabel::kDownX;
  } else {
    throw std::domain_error("box_state_label: spin is not a z or x eigenstate");
  }
  return label;
}

}  // namespace sgsteer
