#include "sgsteer/measurement.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace sgsteer {

namespace {

template <typename Enum, std::size_t N>
using NameTable = std::array<std::pair<Enum, std::string_view>, N>;

constexpr NameTable<Setting, 4> kSettingNames{{{Setting::kPositionZ, "PositionZ"},
                                               {Setting::kSpinZ, "SpinZ"},
                                               {Setting::kSpinX, "SpinX"},
                                               {Setting::kMomentumZ, "MomentumZ"}}};

constexpr NameTable<OutcomeLabel, 4> kOutcomeNames{{{OutcomeLabel::kTokyo, "Tokyo"},
                                                    {OutcomeLabel::kParis, "Paris"},
                                                    {OutcomeLabel::kPlus, "Plus"},
                                                    {OutcomeLabel::kMinus, "Minus"}}};

constexpr NameTable<StateForm, 4> kFormNames{{{StateForm::kPositionEigenstate, "PositionEigenstate"},
                                              {StateForm::kSingleBranchGaussian, "SingleBranchGaussian"},
                                              {StateForm::kBranchSuperposition, "BranchSuperposition"},
                                              {StateForm::kMomentumEigenstate, "MomentumEigenstate"}}};

constexpr NameTable<SpinLabel, 4> kSpinNames{{{SpinLabel::kUpZ, "up_z"},
                                              {SpinLabel::kDownZ, "down_z"},
                                              {SpinLabel::kUpX, "up_x"},
                                              {SpinLabel::kDownX, "down_x"}}};

constexpr NameTable<Location, 3> kLocationNames{{{Location::kTokyo, "Tokyo"},
                                                 {Location::kParis, "Paris"},
                                                 {Location::kDelocalized, "Delocalized"}}};

template <typename Enum, std::size_t N>
std::string_view name_of(const NameTable<Enum, N>& table, Enum value) {
  for (const auto& [e, name] : table) {
    if (e == value) return name;
  }
  throw std::logic_error("unnamed enumerator");
}

template <typename Enum, std::size_t N>
Enum parse_name(const NameTable<Enum, N>& table, std::string_view name, const char* what) {
  for (const auto& [e, n] : table) {
    if (n == name) return e;
  }
  throw std::invalid_argument(std::string("unknown ") + what + ": '" + std::string(name) + "'");
}

// Tokyo carries phi_- / down_z, Paris carries phi_+ / up_z.
Branch branch_of_side(OutcomeLabel label) {
  return label == OutcomeLabel::kTokyo ? Branch::kMinus : Branch::kPlus;
}

Location location_of(Branch branch) { return branch == Branch::kMinus ? Location::kTokyo : Location::kParis; }

SpinLabel spin_of(Branch branch) { return branch == Branch::kMinus ? SpinLabel::kDownZ : SpinLabel::kUpZ; }

void check_label(Setting setting, OutcomeLabel label) {
  const bool spin_setting = setting == Setting::kSpinZ || setting == Setting::kSpinX;
  const bool spin_label = label == OutcomeLabel::kPlus || label == OutcomeLabel::kMinus;
  if (spin_setting != spin_label) {
    throw std::invalid_argument("outcome label " + std::string(to_string(label)) +
                                " does not belong to setting " + std::string(to_string(setting)));
  }
}

}  // namespace

std::string_view to_string(Setting setting) { return name_of(kSettingNames, setting); }
std::string_view to_string(OutcomeLabel label) { return name_of(kOutcomeNames, label); }
std::string_view to_string(StateForm form) { return name_of(kFormNames, form); }
std::string_view to_string(SpinLabel spin) { return name_of(kSpinNames, spin); }
std::string_view to_string(Location location) { return name_of(kLocationNames, location); }

Setting parse_setting(std::string_view name) { return parse_name(kSettingNames, name, "setting"); }
OutcomeLabel parse_outcome_label(std::string_view name) {
  return parse_name(kOutcomeNames, name, "outcome label");
}
StateForm parse_state_form(std::string_view name) { return parse_name(kFormNames, name, "state form"); }
SpinLabel parse_spin_label(std::string_view name) { return parse_name(kSpinNames, name, "spin label"); }
Location parse_location(std::string_view name) { return parse_name(kLocationNames, name, "location"); }

std::vector<OutcomeProbability> outcome_probabilities(Setting setting, double t, const PhysParams& p) {
  p.validate();
  if (!(t >= 0.0)) throw std::invalid_argument("outcome_probabilities: t must be non-negative");
  switch (setting) {
    case Setting::kPositionZ:
    case Setting::kMomentumZ:
      return {{OutcomeLabel::kTokyo, 0.5}, {OutcomeLabel::kParis, 0.5}};
    case Setting::kSpinZ:
      return {{OutcomeLabel::kPlus, 0.5}, {OutcomeLabel::kMinus, 0.5}};
    case Setting::kSpinX: {
      // |(phi_+ +/- phi_-) / 2|^2 integrated over z.
      const double re = branch_overlap(t, p).real();
      return {{OutcomeLabel::kPlus, 0.5 * (1.0 + re)}, {OutcomeLabel::kMinus, 0.5 * (1.0 - re)}};
    }
  }
  throw std::logic_error("unhandled setting");
}

bool detected_by_alice(Setting setting, OutcomeLabel label) {
  check_label(setting, label);
  switch (setting) {
    case Setting::kPositionZ:
    case Setting::kMomentumZ:
      return label == OutcomeLabel::kTokyo;
    case Setting::kSpinZ:
      return label == OutcomeLabel::kMinus;
    case Setting::kSpinX:
      return true;
  }
  throw std::logic_error("unhandled setting");
}

CollapsedState collapsed_state(Setting setting, OutcomeLabel label, double t, const PhysParams& p,
                               std::optional<double> eigenvalue) {
  check_label(setting, label);
  CollapsedState state;
  state.time = t;
  state.params = p;
  state.branches = branch_kinematics(t, p);

  switch (setting) {
    case Setting::kPositionZ: {
      state.form = StateForm::kPositionEigenstate;
      state.branch = branch_of_side(label);
      state.eigenvalue = eigenvalue.value_or(state.branches[state.branch].center_z);
      break;
    }
    case Setting::kMomentumZ: {
      state.form = StateForm::kMomentumEigenstate;
      state.branch = branch_of_side(label);
      state.eigenvalue = eigenvalue.value_or(state.branches[state.branch].mean_momentum_z);
      break;
    }
    case Setting::kSpinZ: {
      state.form = StateForm::kSingleBranchGaussian;
      state.branch = label == OutcomeLabel::kPlus ? Branch::kPlus : Branch::kMinus;
      break;
    }
    case Setting::kSpinX: {
      state.form = StateForm::kBranchSuperposition;
      state.spin = label == OutcomeLabel::kPlus ? SpinLabel::kUpX : SpinLabel::kDownX;
      state.location = Location::kDelocalized;
      state.relative_sign = label == OutcomeLabel::kPlus ? 1 : -1;
      return state;
    }
  }
  state.spin = spin_of(state.branch);
  state.location = location_of(state.branch);
  return state;
}

MeasurementResult measure(Setting setting, double t, const PhysParams& p, RngStream& rng) {
  const auto probabilities = outcome_probabilities(setting, t, p);
  const double u = rng.uniform();
  OutcomeLabel label = probabilities.back().label;
  double cumulative = 0.0;
  for (const auto& [candidate, probability] : probabilities) {
    cumulative += probability;
    if (u < cumulative) {
      label = candidate;
      break;
    }
  }

  Outcome outcome;
  outcome.setting = setting;
  outcome.label = label;
  outcome.detected_locally = detected_by_alice(setting, label);

  std::optional<double> eigenvalue;
  switch (setting) {
    case Setting::kPositionZ: {
      const Branch branch = branch_of_side(label);
      eigenvalue = branch_center(branch, t, p) + branch_position_std(t, p) * rng.normal();
      outcome.value = *eigenvalue;
      break;
    }
    case Setting::kMomentumZ: {
      const Branch branch = branch_of_side(label);
      eigenvalue = branch_mean_momentum(branch, t, p) + branch_momentum_std(p) * rng.normal();
      outcome.value = *eigenvalue;
      break;
    }
    case Setting::kSpinZ:
    case Setting::kSpinX:
      outcome.value = (label == OutcomeLabel::kPlus ? 0.5 : -0.5) * p.hbar;
      break;
  }
  return {outcome, collapsed_state(setting, label, t, p, eigenvalue)};
}

CollapsedState remote_collapse(Setting setting, bool local_outcome_absent, double t, const PhysParams& p) {
  if (!local_outcome_absent) {
    throw std::invalid_argument("remote_collapse: only defined when Alice registered nothing");
  }
  switch (setting) {
    case Setting::kPositionZ:
    case Setting::kMomentumZ:
      return collapsed_state(setting, OutcomeLabel::kParis, t, p);
    case Setting::kSpinZ:
      return collapsed_state(setting, OutcomeLabel::kPlus, t, p);
    case Setting::kSpinX:
      throw std::domain_error("remote_collapse: spin-x has no negative-result channel");
  }
  throw std::logic_error("unhandled setting");
}

double steered_pdf(const CollapsedState& state, double z) {
  const double t = state.time;
  const PhysParams& p = state.params;
  switch (state.form) {
    case StateForm::kPositionEigenstate:
      throw std::domain_error("steered_pdf: position eigenstate is a delta distribution");
    case StateForm::kMomentumEigenstate:
      throw std::domain_error("steered_pdf: momentum eigenstate is not square-integrable");
    case StateForm::kSingleBranchGaussian:
      return std::norm(branch_phi(state.branch, z, t, p));
    case StateForm::kBranchSuperposition: {
      const double sign = state.relative_sign;
      const double weight = 1.0 + sign * branch_overlap(t, p).real();
      if (!(weight > kSeparabilityThreshold)) {
        throw std::domain_error("steered_pdf: branch superposition has vanishing norm");
      }
      const Complex amplitude = branch_phi(Branch::kPlus, z, t, p) + sign * branch_phi(Branch::kMinus, z, t, p);
      return std::norm(amplitude) / (2.0 * weight);
    }
  }
  throw std::logic_error("unhandled state form");
}

}  // namespace sgsteer
