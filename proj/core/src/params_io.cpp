#include "sgsteer/params_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sgsteer {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw std::invalid_argument("config: '" + std::string(key) + "' expects a number, got '" +
                                std::string(value) + "'");
  }
  return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw std::invalid_argument("config: '" + std::string(key) + "' expects a non-negative integer, got '" +
                                std::string(value) + "'");
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    if (!out.emplace(key, value).second) {
      throw std::invalid_argument("config: duplicate key '" + key + "'");
    }
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool apply_param(PhysParams& params, std::string_view key, std::string_view value) {
  if (key == "mu_c") {
    params.mu_c = to_double(key, value);
  } else if (key == "b") {
    params.b = to_double(key, value);
  } else if (key == "B0") {
    params.B0 = to_double(key, value);
  } else if (key == "m") {
    params.m = to_double(key, value);
  } else if (key == "sigma0") {
    params.sigma0 = to_double(key, value);
  } else if (key == "hbar") {
    params.hbar = to_double(key, value);
  } else if (key == "k_y") {
    params.k_y = to_double(key, value);
  } else if (key == "transverse_phase") {
    if (value == "verbatim") {
      params.transverse_phase = TransversePhase::kVerbatim;
    } else if (value == "corrected") {
      params.transverse_phase = TransversePhase::kCorrected;
    } else {
      throw std::invalid_argument("config: transverse_phase must be verbatim or corrected");
    }
  } else {
    return false;
  }
  return true;
}

namespace {

// "preset" has to be applied before the individual fields.
void apply_preset(PhysParams& params, const std::map<std::string, std::string>& kv) {
  const auto it = kv.find("preset");
  if (it == kv.end()) return;
  if (it->second != "silver") throw std::invalid_argument("config: unknown preset '" + it->second + "'");
  params = PhysParams::silver_preset();
}

}  // namespace

PhysParams parse_params(std::string_view text, PhysParams base) {
  const auto kv = parse_key_values(text);
  apply_preset(base, kv);
  for (const auto& [key, value] : kv) {
    if (key == "preset") continue;
    if (!apply_param(base, key, value)) throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  base.validate();
  return base;
}

PhysParams load_params_file(const std::string& path, PhysParams base) {
  return parse_params(read_text_file(path), base);
}

RunConfig parse_run_config(std::string_view text, RunConfig base) {
  const auto kv = parse_key_values(text);
  apply_preset(base.params, kv);
  for (const auto& [key, value] : kv) {
    if (key == "preset" || apply_param(base.params, key, value)) continue;
    if (key == "n_atoms") {
      base.n_atoms = to_u64(key, value);
    } else if (key == "schedule") {
      base.schedule.kind = parse_schedule_kind(value);
    } else if (key == "settings" || key == "setting") {
      base.schedule.settings.clear();
      std::string_view rest = value;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto item = trim(rest.substr(0, comma));
        if (!item.empty()) base.schedule.settings.push_back(parse_setting(item));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      }
    } else if (key == "evolution_time") {
      base.evolution_time = to_double(key, value);
    } else if (key == "seed") {
      base.seed = to_u64(key, value);
    } else if (key == "model") {
      base.model = parse_model(value);
    } else if (key == "threads") {
      base.threads = static_cast<unsigned>(to_u64(key, value));
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  base.validate();
  return base;
}

RunConfig load_run_config_file(const std::string& path, RunConfig base) {
  return parse_run_config(read_text_file(path), base);
}

std::string format_params(const PhysParams& params) {
  std::ostringstream out;
  out << "mu_c = " << format_double(params.mu_c) << '\n'
      << "b = " << format_double(params.b) << '\n'
      << "B0 = " << format_double(params.B0) << '\n'
      << "m = " << format_double(params.m) << '\n'
      << "sigma0 = " << format_double(params.sigma0) << '\n'
      << "hbar = " << format_double(params.hbar) << '\n'
      << "k_y = " << format_double(params.k_y) << '\n'
      << "transverse_phase = "
      << (params.transverse_phase == TransversePhase::kVerbatim ? "verbatim" : "corrected") << '\n';
  return out.str();
}

}  // namespace sgsteer
