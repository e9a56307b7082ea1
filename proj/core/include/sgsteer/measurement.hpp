#pragma once

// Projective measurement of the Stern-Gerlach state by Alice's detector.
//
// Alice's detector only covers the Tokyo branch (phi_-, down_z). Outcomes that
// land on the Paris branch are "registered nothing" at Alice's side, but the
// state still collapses globally.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgsteer/numerics.hpp"
#include "sgsteer/wavefunction.hpp"

namespace sgsteer {

enum class Setting { kPositionZ, kSpinZ, kSpinX, kMomentumZ };

/// Position/momentum outcomes are labelled by the side the branch sits on,
/// spin outcomes by the sign of the eigenvalue.
enum class OutcomeLabel { kTokyo, kParis, kPlus, kMinus };

enum class StateForm { kPositionEigenstate, kSingleBranchGaussian, kBranchSuperposition, kMomentumEigenstate };

enum class SpinLabel { kUpZ, kDownZ, kUpX, kDownX };

enum class Location { kTokyo, kParis, kDelocalized };

std::string_view to_string(Setting setting);
std::string_view to_string(OutcomeLabel label);
std::string_view to_string(StateForm form);
std::string_view to_string(SpinLabel spin);
std::string_view to_string(Location location);

/// Inverse of to_string; throw std::invalid_argument on unknown names.
Setting parse_setting(std::string_view name);
OutcomeLabel parse_outcome_label(std::string_view name);
StateForm parse_state_form(std::string_view name);
SpinLabel parse_spin_label(std::string_view name);
Location parse_location(std::string_view name);

struct Outcome {
  Setting setting = Setting::kSpinZ;
  OutcomeLabel label = OutcomeLabel::kPlus;
  /// z position, +/- hbar/2 or p_z.
  double value = 0.0;
  /// false when Alice's Tokyo detector registered nothing.
  bool detected_locally = false;
};

/// The part of a collapsed state that is compared across runs and models.
struct StateLabel {
  StateForm form = StateForm::kSingleBranchGaussian;
  SpinLabel spin = SpinLabel::kUpZ;
  Location location = Location::kParis;

  friend bool operator==(const StateLabel&, const StateLabel&) = default;
};

struct CollapsedState {
  StateForm form = StateForm::kSingleBranchGaussian;
  SpinLabel spin = SpinLabel::kUpZ;
  Location location = Location::kParis;

  /// Branch carrying the state for the single-branch forms.
  Branch branch = Branch::kPlus;
  /// Geometry of both branches at the collapse time.
  BranchPair branches;
  /// +1 or -1 for kBranchSuperposition, 0 otherwise.
  int relative_sign = 0;
  /// Eigenvalue for the eigenstate forms (delta location or p_z).
  std::optional<double> eigenvalue;

  double time = 0.0;
  PhysParams params;

  StateLabel label() const { return {form, spin, location}; }
};

struct OutcomeProbability {
  OutcomeLabel label;
  double probability;
};

/// Outcome distribution of a setting. The order is fixed: {Tokyo, Paris} for
/// position and momentum, {Plus, Minus} for the spin settings.
std::vector<OutcomeProbability> outcome_probabilities(Setting setting, double t, const PhysParams& p);

/// Whether the outcome fires Alice's detector.
bool detected_by_alice(Setting setting, OutcomeLabel label);

/// Post-measurement state for a given outcome. For the eigenstate forms the
/// eigenvalue defaults to the branch centre (position) or branch mean momentum.
CollapsedState collapsed_state(Setting setting, OutcomeLabel label, double t, const PhysParams& p,
                               std::optional<double> eigenvalue = std::nullopt);

struct MeasurementResult {
  Outcome outcome;
  CollapsedState state;
};

/// Samples one outcome and builds the collapsed state. Consumes one uniform
/// for the outcome, plus one normal deviate for position and momentum.
MeasurementResult measure(Setting setting, double t, const PhysParams& p, RngStream& rng);

/// State reached when Alice's detector registers nothing. Only position,
/// spin-z and momentum have such a channel; spin-x raises std::domain_error.
CollapsedState remote_collapse(Setting setting, bool local_outcome_absent, double t, const PhysParams& p);

/// Below this value of 1 +/- Re<phi_+|phi_-> a branch superposition is
/// treated as having zero norm.
inline constexpr double kSeparabilityThreshold = 1e-10;

/// Position density of a steered state. Throws std::domain_error for
/// eigenstate forms and for superpositions below the separability threshold.
double steered_pdf(const CollapsedState& state, double z);

}  // namespace sgsteer
