#include "sgsteer/protocol.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "sgsteer/boxes.hpp"

namespace sgsteer {

namespace {

// Box-model collapses are evaluated on this state.
const PathSpinState& box_state() {
  static const PathSpinState psi = make_psi2();
  return psi;
}

}  // namespace

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kFixed:
      return "fixed";
    case ScheduleKind::kAlternating:
      return "alternating";
    case ScheduleKind::kRandom:
      return "random";
  }
  throw std::logic_error("unhandled schedule kind");
}

std::string_view to_string(Model model) { return model == Model::kContinuous ? "continuous" : "boxes"; }

ScheduleKind parse_schedule_kind(std::string_view name) {
  if (name == "fixed") return ScheduleKind::kFixed;
  if (name == "alternating") return ScheduleKind::kAlternating;
  if (name == "random") return ScheduleKind::kRandom;
  throw std::invalid_argument("unknown schedule: '" + std::string(name) + "'");
}

Model parse_model(std::string_view name) {
  if (name == "continuous") return Model::kContinuous;
  if (name == "boxes") return Model::kBoxes;
  throw std::invalid_argument("unknown model: '" + std::string(name) + "'");
}

void RunConfig::validate() const {
  if (n_atoms == 0) throw std::invalid_argument("RunConfig: n_atoms must be >= 1");
  if (schedule.settings.empty()) throw std::invalid_argument("RunConfig: schedule has no settings");
  if (!(evolution_time >= 0.0) || !std::isfinite(evolution_time)) {
    throw std::invalid_argument("RunConfig: evolution_time must be finite and >= 0");
  }
  if (threads == 0) throw std::invalid_argument("RunConfig: threads must be >= 1");
  params.validate();
  if (model == Model::kBoxes) {
    for (Setting s : schedule.settings) {
      if (s == Setting::kMomentumZ) {
        throw std::invalid_argument("RunConfig: the box model has no momentum setting");
      }
    }
  }
}

Setting RunConfig::setting_for(std::uint64_t atom_index) const {
  const auto& settings = schedule.settings;
  switch (schedule.kind) {
    case ScheduleKind::kFixed:
      return settings.front();
    case ScheduleKind::kAlternating:
      return settings[atom_index % settings.size()];
    case ScheduleKind::kRandom: {
      RngStream rng(seed, kScheduleStreamBit | atom_index);
      const auto index = static_cast<std::size_t>(rng.uniform() * static_cast<double>(settings.size()));
      return settings[std::min(index, settings.size() - 1)];
    }
  }
  throw std::logic_error("unhandled schedule kind");
}

OutcomeLabel outcome_label_of(const RunRecord& record) {
  switch (record.setting) {
    case Setting::kPositionZ:
    case Setting::kMomentumZ:
      return record.bob_state.location == Location::kTokyo ? OutcomeLabel::kTokyo : OutcomeLabel::kParis;
    case Setting::kSpinZ:
      return record.bob_state.spin == SpinLabel::kUpZ ? OutcomeLabel::kPlus : OutcomeLabel::kMinus;
    case Setting::kSpinX:
      return record.bob_state.spin == SpinLabel::kUpX ? OutcomeLabel::kPlus : OutcomeLabel::kMinus;
  }
  throw std::logic_error("unhandled setting");
}

namespace {

RunRecord continuous_atom(const RunConfig& config, std::uint64_t index, Setting setting) {
  RngStream rng(config.seed, index);
  const MeasurementResult result = measure(setting, config.evolution_time, config.params, rng);
  RunRecord record;
  record.atom_index = index;
  record.setting = setting;
  record.alice_detected = result.outcome.detected_locally;
  if (record.alice_detected) record.alice_value = result.outcome.value;
  record.bob_state = result.state.label();
  return record;
}

RunRecord boxes_atom(const RunConfig& config, std::uint64_t index, Setting setting) {
  RngStream rng(config.seed, index);
  const double u = rng.uniform();
  const auto outcomes = box_outcomes(setting);

  OutcomeLabel label = outcomes.back();
  Projection chosen = project(box_state(), setting, label);
  double cumulative = 0.0;
  for (OutcomeLabel candidate : outcomes) {
    Projection projection = project(box_state(), setting, candidate);
    cumulative += projection.probability;
    if (u < cumulative) {
      label = candidate;
      chosen = std::move(projection);
      break;
    }
  }

  RunRecord record;
  record.atom_index = index;
  record.setting = setting;
  record.alice_detected = detected_by_alice(setting, label);
  if (record.alice_detected) {
    if (setting == Setting::kPositionZ) {
      record.alice_value = branch_center(Branch::kMinus, config.evolution_time, config.params);
    } else {
      record.alice_value = (label == OutcomeLabel::kPlus ? 0.5 : -0.5) * config.params.hbar;
    }
  }
  record.bob_state = box_state_label(*chosen.state, setting);
  return record;
}

}  // namespace

std::uint64_t SettingTally::count(OutcomeLabel label) const {
  for (const auto& [l, c] : counts) {
    if (l == label) return c;
  }
  return 0;
}

double SettingTally::frequency(OutcomeLabel label) const {
  return trials == 0 ? 0.0 : static_cast<double>(count(label)) / static_cast<double>(trials);
}

double SettingTally::standard_error(OutcomeLabel label) const {
  if (trials == 0) return 0.0;
  const double f = frequency(label);
  return std::sqrt(f * (1.0 - f) / static_cast<double>(trials));
}

const SettingTally* Tally::find(Setting setting) const {
  for (const auto& t : per_setting) {
    if (t.setting == setting) return &t;
  }
  return nullptr;
}

namespace {

std::vector<OutcomeLabel> labels_for(Setting setting) {
  switch (setting) {
    case Setting::kPositionZ:
    case Setting::kMomentumZ:
      return {OutcomeLabel::kTokyo, OutcomeLabel::kParis};
    case Setting::kSpinZ:
    case Setting::kSpinX:
      return {OutcomeLabel::kPlus, OutcomeLabel::kMinus};
  }
  throw std::logic_error("unhandled setting");
}

}  // namespace

Tally tally_statistics(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("tally_statistics: no records");
  Tally tally;
  tally.n_atoms = records.size();
  for (const auto& record : records) {
    SettingTally* entry = nullptr;
    for (auto& t : tally.per_setting) {
      if (t.setting == record.setting) entry = &t;
    }
    if (entry == nullptr) {
      SettingTally fresh{record.setting, 0, {}};
      for (OutcomeLabel l : labels_for(record.setting)) fresh.counts.emplace_back(l, 0);
      tally.per_setting.push_back(fresh);
      entry = &tally.per_setting.back();
    }
    ++entry->trials;
    const OutcomeLabel label = outcome_label_of(record);
    for (auto& [l, c] : entry->counts) {
      if (l == label) ++c;
    }
    switch (record.bob_state.location) {
      case Location::kTokyo:
        ++tally.tokyo;
        break;
      case Location::kParis:
        ++tally.paris;
        break;
      case Location::kDelocalized:
        ++tally.delocalized;
        break;
    }
  }
  std::sort(tally.per_setting.begin(), tally.per_setting.end(),
            [](const SettingTally& a, const SettingTally& b) { return a.setting < b.setting; });
  return tally;
}

RunResult run_experiment(const RunConfig& config) {
  config.validate();
  RunResult result;
  result.records.resize(config.n_atoms);

  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      const Setting setting = config.setting_for(i);
      RunRecord record = config.model == Model::kContinuous ? continuous_atom(config, i, setting)
                                                             : boxes_atom(config, i, setting);
      // Green control message, then the result message on the Alice-Bob channel.
      record.seq_control = 2 * i;
      record.seq_result = 2 * i + 1;
      result.records[i] = record;
    }
  };

  const std::uint64_t workers = std::min<std::uint64_t>(config.threads, config.n_atoms);
  if (workers <= 1) {
    work(0, config.n_atoms);
  } else {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (config.n_atoms + workers - 1) / workers;
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min(config.n_atoms, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
  }

  result.tally = tally_statistics(result.records);
  return result;
}

std::vector<OutcomeProbability> expected_probabilities(const RunConfig& config, Setting setting) {
  if (config.model == Model::kContinuous) {
    return outcome_probabilities(setting, config.evolution_time, config.params);
  }
  std::vector<OutcomeProbability> out;
  for (const auto& member : assemblage(box_state(), setting).members) {
    out.push_back({member.label, member.probability});
  }
  return out;
}

std::vector<ConformanceCheck> conformance(const Tally& tally, const RunConfig& config, double n_sigma) {
  std::vector<ConformanceCheck> checks;
  for (const auto& entry : tally.per_setting) {
    for (const auto& [label, probability] : expected_probabilities(config, entry.setting)) {
      ConformanceCheck check;
      check.setting = entry.setting;
      check.label = label;
      check.trials = entry.trials;
      check.expected = probability;
      check.observed = entry.frequency(label);
      check.standard_error =
          std::sqrt(std::max(0.0, probability * (1.0 - probability)) / static_cast<double>(entry.trials));
      const double deviation = std::abs(check.observed - check.expected);
      check.pass = check.standard_error > 0.0 ? deviation <= n_sigma * check.standard_error
                                              : check.observed == std::round(check.expected);
      checks.push_back(check);
    }
  }
  return checks;
}

std::string format_double(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buffer, end);
}

namespace {

void write_csv_row(std::ostream& out, const RunRecord& r) {
  out << r.atom_index << ',' << to_string(r.setting) << ',' << (r.alice_detected ? 1 : 0) << ','
      << (r.alice_value ? format_double(*r.alice_value) : std::string{}) << ','
      << to_string(r.bob_state.form) << ',' << to_string(r.bob_state.spin) << ','
      << to_string(r.bob_state.location) << ',' << r.seq_control << ',' << r.seq_result << '\n';
}

void write_json_row(std::ostream& out, const RunRecord& r) {
  out << "{\"atom_index\":" << r.atom_index << ",\"setting\":\"" << to_string(r.setting)
      << "\",\"alice_detected\":" << (r.alice_detected ? 1 : 0)
      << ",\"alice_value\":" << (r.alice_value ? format_double(*r.alice_value) : std::string("null"))
      << ",\"bob_form\":\"" << to_string(r.bob_state.form) << "\",\"bob_spin\":\""
      << to_string(r.bob_state.spin) << "\",\"bob_location\":\"" << to_string(r.bob_state.location)
      << "\",\"seq_control\":" << r.seq_control << ",\"seq_result\":" << r.seq_result << "}\n";
}

std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("expected unsigned integer, got '" + std::string(text) + "'");
  }
  return value;
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("expected number, got '" + std::string(text) + "'");
  }
  return value;
}

bool parse_flag(std::string_view text) {
  if (text == "1") return true;
  if (text == "0") return false;
  throw std::invalid_argument("expected 0 or 1, got '" + std::string(text) + "'");
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

RunRecord parse_csv_row(std::string_view line) {
  const auto f = split(line, ',');
  if (f.size() != 9) throw std::invalid_argument("CSV row must have 9 fields: '" + std::string(line) + "'");
  RunRecord r;
  r.atom_index = parse_u64(f[0]);
  r.setting = parse_setting(f[1]);
  r.alice_detected = parse_flag(f[2]);
  if (!f[3].empty()) r.alice_value = parse_double(f[3]);
  r.bob_state = {parse_state_form(f[4]), parse_spin_label(f[5]), parse_location(f[6])};
  r.seq_control = parse_u64(f[7]);
  r.seq_result = parse_u64(f[8]);
  return r;
}

RunRecord parse_json_row(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed JSON record: ") + e.what());
  }
  try {
    RunRecord r;
    r.atom_index = j.at("atom_index").get<std::uint64_t>();
    r.setting = parse_setting(j.at("setting").get<std::string>());
    const int detected = j.at("alice_detected").get<int>();
    if (detected != 0 && detected != 1) throw std::invalid_argument("alice_detected must be 0 or 1");
    r.alice_detected = detected == 1;
    if (!j.at("alice_value").is_null()) r.alice_value = j.at("alice_value").get<double>();
    r.bob_state = {parse_state_form(j.at("bob_form").get<std::string>()),
                   parse_spin_label(j.at("bob_spin").get<std::string>()),
                   parse_location(j.at("bob_location").get<std::string>())};
    r.seq_control = j.at("seq_control").get<std::uint64_t>();
    r.seq_result = j.at("seq_result").get<std::uint64_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("invalid JSON record: ") + e.what());
  }
}

}  // namespace

void write_records(std::ostream& out, const std::vector<RunRecord>& records, RecordFormat format) {
  if (format == RecordFormat::kCsv) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) write_csv_row(out, r);
  } else {
    for (const auto& r : records) write_json_row(out, r);
  }
}

std::string serialize_records(const std::vector<RunRecord>& records, RecordFormat format) {
  std::ostringstream out;
  write_records(out, records, format);
  return out.str();
}

void write_records_file(const std::string& path, const std::vector<RunRecord>& records, RecordFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_records(out, records, format);
  out.flush();
  if (!out) throw std::runtime_error("failed writing records to '" + path + "'");
}

std::vector<RunRecord> parse_records(std::string_view text, RecordFormat format) {
  auto lines = lines_of(text);
  std::vector<RunRecord> records;
  if (format == RecordFormat::kCsv) {
    if (lines.empty() || lines.front() != kCsvHeader) {
      throw std::invalid_argument("CSV input does not start with the record header");
    }
    for (std::size_t i = 1; i < lines.size(); ++i) records.push_back(parse_csv_row(lines[i]));
  } else {
    for (auto line : lines) records.push_back(parse_json_row(line));
  }
  return records;
}

}  // namespace sgsteer
