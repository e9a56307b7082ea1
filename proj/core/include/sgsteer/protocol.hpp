#pragma once

// Alice-controlled Stern-Gerlach runs: per-atom measurement, null detections,
// the state left for Bob, tallies and record files.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgsteer/measurement.hpp"
#include "sgsteer/wavefunction.hpp"

namespace sgsteer {

enum class ScheduleKind { kFixed, kAlternating, kRandom };
enum class Model { kContinuous, kBoxes };

std::string_view to_string(ScheduleKind kind);
std::string_view to_string(Model model);
ScheduleKind parse_schedule_kind(std::string_view name);
Model parse_model(std::string_view name);

struct Schedule {
  ScheduleKind kind = ScheduleKind::kFixed;
  /// kFixed uses the first entry; kAlternating cycles; kRandom draws uniformly.
  std::vector<Setting> settings{Setting::kSpinZ};

  static Schedule fixed(Setting setting) { return {ScheduleKind::kFixed, {setting}}; }
};

/// Stream id used for the per-atom setting draw of a random schedule.
inline constexpr std::uint64_t kScheduleStreamBit = std::uint64_t{1} << 63;

struct RunConfig {
  std::uint64_t n_atoms = 1;
  Schedule schedule;
  double evolution_time = 0.0;
  PhysParams params;
  std::uint64_t seed = 0;
  Model model = Model::kContinuous;
  /// Worker threads; the records do not depend on this.
  unsigned threads = 1;

  /// Throws std::invalid_argument on n_atoms == 0, an empty schedule, a
  /// negative time, invalid params or a momentum setting in the box model.
  void validate() const;

  Setting setting_for(std::uint64_t atom_index) const;
};

struct RunRecord {
  std::uint64_t atom_index = 0;
  Setting setting = Setting::kSpinZ;
  bool alice_detected = false;
  /// Empty for a null detection.
  std::optional<double> alice_value;
  StateLabel bob_state;
  std::uint64_t seq_control = 0;
  std::uint64_t seq_result = 0;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Outcome label implied by a record.
OutcomeLabel outcome_label_of(const RunRecord& record);

struct SettingTally {
  Setting setting;
  std::uint64_t trials = 0;
  /// Counts in the order of outcome_probabilities / box_outcomes.
  std::vector<std::pair<OutcomeLabel, std::uint64_t>> counts;

  std::uint64_t count(OutcomeLabel label) const;
  double frequency(OutcomeLabel label) const;
  /// Binomial standard error of the empirical frequency.
  double standard_error(OutcomeLabel label) const;
};

struct Tally {
  std::uint64_t n_atoms = 0;
  std::vector<SettingTally> per_setting;
  std::uint64_t tokyo = 0;
  std::uint64_t paris = 0;
  std::uint64_t delocalized = 0;

  const SettingTally* find(Setting setting) const;
};

Tally tally_statistics(const std::vector<RunRecord>& records);

struct RunResult {
  std::vector<RunRecord> records;
  Tally tally;
};

RunResult run_experiment(const RunConfig& config);

/// Analytic outcome distribution of a setting under the configured model.
std::vector<OutcomeProbability> expected_probabilities(const RunConfig& config, Setting setting);

struct ConformanceCheck {
  Setting setting;
  OutcomeLabel label;
  std::uint64_t trials = 0;
  double expected = 0.0;
  double observed = 0.0;
  /// sqrt(p (1 - p) / n) at the expected p.
  double standard_error = 0.0;
  bool pass = false;
};

/// Compares every setting's frequencies against the analytic values. With a
/// zero standard error (p = 0 or 1) the frequency must match exactly.
std::vector<ConformanceCheck> conformance(const Tally& tally, const RunConfig& config, double n_sigma = 5.0);

enum class RecordFormat { kCsv, kJsonLines };

inline constexpr std::string_view kCsvHeader =
    "atom_index,setting,alice_detected,alice_value,bob_form,bob_spin,bob_location,seq_control,seq_result";

/// General-format text with 17 significant digits (round-trip safe).
std::string format_double(double value);

std::string serialize_records(const std::vector<RunRecord>& records, RecordFormat format);
void write_records(std::ostream& out, const std::vector<RunRecord>& records, RecordFormat format);
/// Throws std::runtime_error if the file cannot be written.
void write_records_file(const std::string& path, const std::vector<RunRecord>& records, RecordFormat format);

/// Throws std::invalid_argument on malformed input.
std::vector<RunRecord> parse_records(std::string_view text, RecordFormat format);

}  // namespace sgsteer
