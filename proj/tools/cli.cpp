#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sgsteer/boxes.hpp"
#include "sgsteer/measurement.hpp"
#include "sgsteer/params_io.hpp"
#include "sgsteer/protocol.hpp"
#include "sgsteer/wavefunction.hpp"

namespace sgsteer::cli {

namespace {

using Json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string params_file;
  std::string out;
  std::string format = "csv";
};

PhysParams load_params(const Globals& g) {
  if (g.params_file.empty()) return {};
  return load_params_file(g.params_file);
}

// --out wins; a relative --out lands in the output directory when one is set.
std::optional<std::filesystem::path> destination(const Globals& g, const std::string& default_name) {
  const char* env = std::getenv(kOutputDirEnv);
  const std::filesystem::path dir = env != nullptr ? std::filesystem::path(env) : std::filesystem::path();
  if (!g.out.empty()) {
    std::filesystem::path p(g.out);
    if (p.is_relative() && !dir.empty()) p = dir / p;
    return p;
  }
  if (!dir.empty()) return dir / default_name;
  return std::nullopt;
}

void emit(const Globals& g, const std::string& default_name, const std::string& text, std::ostream& out) {
  const auto path = destination(g, default_name);
  if (!path) {
    out << text;
    return;
  }
  if (path->has_parent_path()) std::filesystem::create_directories(path->parent_path());
  std::ofstream file(*path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open '" + path->string() + "' for writing");
  file << text;
  if (!file.flush()) throw std::runtime_error("failed writing '" + path->string() + "'");
}

Json params_json(const PhysParams& p) {
  return Json{{"mu_c", p.mu_c},     {"b", p.b},       {"B0", p.B0},  {"m", p.m},
              {"sigma0", p.sigma0}, {"hbar", p.hbar}, {"k_y", p.k_y},
              {"transverse_phase", p.transverse_phase == TransversePhase::kVerbatim ? "verbatim" : "corrected"}};
}

// ---------------------------------------------------------------- pdf

struct PdfOptions {
  double time = 0.0;
  std::optional<double> z_min;
  std::optional<double> z_max;
  int points = 401;
};

int cmd_pdf(const Globals& g, const PdfOptions& o, std::ostream& out) {
  if (o.points < 2) throw UsageError("pdf: --points must be >= 2");
  const PhysParams p = load_params(g);
  if (!(o.time >= 0.0)) throw UsageError("pdf: --time must be >= 0");
  const double reach = branch_displacement(o.time, p) + 8.0 * branch_position_std(o.time, p);
  const double lo = o.z_min.value_or(-reach);
  const double hi = o.z_max.value_or(reach);
  if (!(hi > lo)) throw UsageError("pdf: --z-max must exceed --z-min");

  std::vector<double> zs, total, up, down;
  for (int i = 0; i < o.points; ++i) {
    const double z = lo + (hi - lo) * i / (o.points - 1);
    const PositionPdf pdf = position_pdf_z(z, o.time, p);
    zs.push_back(z);
    total.push_back(pdf.total);
    up.push_back(pdf.up);
    down.push_back(pdf.down);
  }

  std::ostringstream text;
  if (g.format == "csv") {
    text << "z,pdf_total,pdf_up,pdf_down\n";
    for (std::size_t i = 0; i < zs.size(); ++i) {
      text << format_double(zs[i]) << ',' << format_double(total[i]) << ',' << format_double(up[i]) << ','
           << format_double(down[i]) << '\n';
    }
  } else {
    const Json j{{"time", o.time}, {"params", params_json(p)}, {"z", zs},
                 {"pdf_total", total}, {"pdf_up", up}, {"pdf_down", down}};
    text << j.dump(2) << '\n';
  }
  emit(g, g.format == "csv" ? "pdf.csv" : "pdf.json", text.str(), out);
  return kExitOk;
}

// ---------------------------------------------------------------- measure

struct MeasureOptions {
  std::string setting;
  double time = 0.0;
  std::uint64_t samples = 10'000;
};

int cmd_measure(const Globals& g, const MeasureOptions& o, std::ostream& out) {
  const Setting setting = parse_setting(o.setting);
  if (o.samples == 0) throw UsageError("measure: -n must be >= 1");
  if (!(o.time >= 0.0)) throw UsageError("measure: --time must be >= 0");
  const PhysParams p = load_params(g);
  const std::uint64_t seed = g.seed.value_or(0);

  const auto probs = outcome_probabilities(setting, o.time, p);
  std::vector<std::uint64_t> counts(probs.size(), 0);
  RngStream rng(seed, 0);
  for (std::uint64_t i = 0; i < o.samples; ++i) {
    const OutcomeLabel label = measure(setting, o.time, p, rng).outcome.label;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      if (probs[k].label == label) ++counts[k];
    }
  }

  const double n = static_cast<double>(o.samples);
  bool all_pass = true;
  Json outcomes = Json::array();
  for (std::size_t k = 0; k < probs.size(); ++k) {
    const double expected = probs[k].probability;
    const double empirical = static_cast<double>(counts[k]) / n;
    const double se = std::sqrt(std::max(0.0, expected * (1.0 - expected)) / n);
    const double deviation = std::abs(empirical - expected);
    const bool pass = se > 0.0 ? deviation <= 5.0 * se : empirical == std::round(expected);
    all_pass = all_pass && pass;
    outcomes.push_back(Json{{"label", to_string(probs[k].label)},
                            {"analytic", expected},
                            {"empirical", empirical},
                            {"count", counts[k]},
                            {"standard_error", se},
                            {"empirical_standard_error", std::sqrt(empirical * (1.0 - empirical) / n)},
                            {"z_score", se > 0.0 ? Json(deviation / se) : Json(nullptr)},
                            {"pass", pass}});
  }

  const Json report{{"command", "measure"}, {"setting", to_string(setting)}, {"time", o.time},
                    {"samples", o.samples}, {"seed", seed},  {"params", params_json(p)},
                    {"outcomes", outcomes}, {"pass", all_pass}};
  emit(g, "measure.json", report.dump(2) + "\n", out);
  return all_pass ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------- boxes

Json matrix_json(const Matrix4c& m) {
  Json rows = Json::array();
  for (int i = 0; i < 4; ++i) {
    Json row = Json::array();
    for (int j = 0; j < 4; ++j) row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(row);
  }
  return rows;
}

Json assemblage_json(const Assemblage& a) {
  Json members = Json::array();
  for (const auto& m : a.members) {
    members.push_back(Json{{"label", to_string(m.label)},
                           {"probability", m.probability},
                           {"purity", m.state.purity()},
                           {"state", matrix_json(m.state.matrix())}});
  }
  return Json{{"setting", to_string(a.setting)}, {"members", members}, {"average", matrix_json(a.average().matrix())}};
}

Json distance_matrix_json(const Distinguishability& d) {
  Json rows = Json::array();
  for (const auto& r : d.matrix) {
    Json row = Json::array();
    for (double v : r) row.push_back(std::isnan(v) ? Json(nullptr) : Json(v));
    rows.push_back(row);
  }
  return rows;
}

int cmd_boxes(const Globals& g, std::ostream& out) {
  const PathSpinState psi = make_psi2();
  const std::vector<Setting> settings{Setting::kPositionZ, Setting::kSpinZ, Setting::kSpinX};
  std::vector<Assemblage> as;
  Json assemblages = Json::array();
  for (Setting s : settings) {
    as.push_back(assemblage(psi, s));
    assemblages.push_back(assemblage_json(as.back()));
  }
  const double deviation = nonsignaling_deviation(as);
  const double full_deviation = full_state_average_deviation(as);

  Json distinguishability = Json::array();
  double pos_vs_spin_x = 0.0;
  for (std::size_t i = 0; i < as.size(); ++i) {
    for (std::size_t j = i + 1; j < as.size(); ++j) {
      const auto d = steering_distinguishability(as[i], as[j]);
      if (settings[i] == Setting::kPositionZ && settings[j] == Setting::kSpinX) pos_vs_spin_x = d.value;
      distinguishability.push_back(Json{{"a", to_string(settings[i])},
                                        {"b", to_string(settings[j])},
                                        {"value", d.value},
                                        {"trace_distance_matrix", distance_matrix_json(d)}});
    }
  }

  const bool pass = deviation < 1e-12 && pos_vs_spin_x >= 0.86;
  const Json report{{"command", "boxes"},
                    {"basis", {"Paris,up_z", "Paris,down_z", "Tokyo,up_z", "Tokyo,down_z"}},
                    {"assemblages", assemblages},
                    {"nonsignaling_deviation", deviation},
                    {"full_state_average_deviation", full_deviation},
                    {"distinguishability", distinguishability},
                    {"pass", pass}};
  emit(g, "boxes.json", report.dump(2) + "\n", out);
  return pass ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------- protocol

struct ProtocolOptions {
  std::string config_file;
  std::optional<std::uint64_t> n_atoms;
  std::vector<std::string> settings;
  std::optional<std::string> schedule;
  std::optional<double> time;
  std::optional<std::string> model;
  std::optional<unsigned> threads;
};

Json tally_json(const Tally& tally) {
  Json per_setting = Json::array();
  for (const auto& t : tally.per_setting) {
    Json counts = Json::object();
    for (const auto& [label, c] : t.counts) counts[std::string(to_string(label))] = c;
    per_setting.push_back(Json{{"setting", to_string(t.setting)}, {"trials", t.trials}, {"counts", counts}});
  }
  return Json{{"n_atoms", tally.n_atoms},
              {"tokyo", tally.tokyo},
              {"paris", tally.paris},
              {"delocalized", tally.delocalized},
              {"per_setting", per_setting}};
}

int cmd_protocol(const Globals& g, const ProtocolOptions& o, std::ostream& out) {
  RunConfig config;
  config.params = load_params(g);
  if (!o.config_file.empty()) {
    config = parse_run_config(read_text_file(o.config_file), config);
  }
  if (o.n_atoms) config.n_atoms = *o.n_atoms;
  if (!o.settings.empty()) {
    config.schedule.settings.clear();
    for (const auto& s : o.settings) config.schedule.settings.push_back(parse_setting(s));
  }
  if (o.schedule) config.schedule.kind = parse_schedule_kind(*o.schedule);
  if (o.time) config.evolution_time = *o.time;
  if (o.model) config.model = parse_model(*o.model);
  if (o.threads) config.threads = *o.threads;
  if (g.seed) config.seed = *g.seed;
  config.validate();

  const RunResult result = run_experiment(config);
  const RecordFormat format = g.format == "csv" ? RecordFormat::kCsv : RecordFormat::kJsonLines;
  const auto path = destination(g, format == RecordFormat::kCsv ? "records.csv" : "records.jsonl");
  if (path) {
    if (path->has_parent_path()) std::filesystem::create_directories(path->parent_path());
    write_records_file(path->string(), result.records, format);
  }

  bool all_pass = true;
  Json checks = Json::array();
  for (const auto& c : conformance(result.tally, config)) {
    all_pass = all_pass && c.pass;
    checks.push_back(Json{{"setting", to_string(c.setting)},
                          {"label", to_string(c.label)},
                          {"trials", c.trials},
                          {"expected", c.expected},
                          {"observed", c.observed},
                          {"standard_error", c.standard_error},
                          {"pass", c.pass}});
  }

  Json settings = Json::array();
  for (Setting s : config.schedule.settings) settings.push_back(to_string(s));
  const Json report{{"command", "protocol"},
                    {"n_atoms", config.n_atoms},
                    {"schedule", to_string(config.schedule.kind)},
                    {"settings", settings},
                    {"evolution_time", config.evolution_time},
                    {"model", to_string(config.model)},
                    {"seed", config.seed},
                    {"params", params_json(config.params)},
                    {"records_path", path ? Json(path->string()) : Json(nullptr)},
                    {"tally", tally_json(result.tally)},
                    {"conformance", checks},
                    {"pass", all_pass}};
  out << report.dump(2) << '\n';
  return all_pass ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------- validate

struct CheckList {
  Json items = Json::array();
  bool hard_pass = true;

  void add(const std::string& name, bool hard, double value, double threshold, bool pass,
           const std::string& comparison = "<") {
    items.push_back(Json{{"name", name},
                         {"kind", hard ? "hard" : "informational"},
                         {"value", value},
                         {"threshold", threshold},
                         {"comparison", comparison},
                         {"pass", pass}});
    if (hard) hard_pass = hard_pass && pass;
  }
};

QuadratureSpec span(double center, double half_width, double abs_tol = 1e-13) {
  QuadratureSpec spec;
  spec.lower = center - half_width;
  spec.upper = center + half_width;
  spec.abs_tol = abs_tol;
  spec.rel_tol = 1e-12;
  spec.max_subdivisions = 20000;
  return spec;
}

QuadratureSpec branch_window(Branch br, double t, const PhysParams& p, double abs_tol = 1e-300) {
  return span(branch_center(br, t, p), 14.0 * branch_position_std(t, p), abs_tol);
}

// Grid over both branch windows (the gap between them carries no weight).
std::vector<double> branch_grid(double t, const PhysParams& p, int points_per_branch) {
  std::vector<double> zs;
  for (Branch br : {Branch::kPlus, Branch::kMinus}) {
    const auto w = branch_window(br, t, p);
    for (int i = 0; i < points_per_branch; ++i) {
      zs.push_back(w.lower + (w.upper - w.lower) * i / (points_per_branch - 1));
    }
  }
  return zs;
}

// 3-D norm of the state through separable 1-D quadratures.
double state_norm(double t, const PhysParams& p) {
  const double sd = branch_position_std(t, p);
  const QuadratureSpec xy = span(0.0, 14.0 * sd + 4.0 * p.sigma0 * p.sigma0 * std::abs(p.k_y), 1e-300);
  const double ix = integrate_real([&](double x) { return std::norm(transverse_factor(x, 0.0, t, p)); }, xy);
  const double iy = integrate_real([&](double y) { return std::norm(transverse_factor(0.0, y, t, p)); }, xy);
  const double m0 = std::norm(transverse_factor(0.0, 0.0, t, p));
  double iz = 0.0;
  for (Branch br : {Branch::kPlus, Branch::kMinus}) {
    iz += integrate_real(
        [&](double z) {
          const SpinorAmplitude s = evaluate_state(0.0, 0.0, z, t, p);
          return br == Branch::kPlus ? std::norm(s.up) : std::norm(s.down);
        },
        branch_window(br, t, p));
  }
  return ix * iy * iz / (m0 * m0);
}

// Re<phi_+|phi_-> by quadrature of the raw branches.
double overlap_real_by_quadrature(double t, const PhysParams& p) {
  auto raw = [&](Branch br, double z) { return branch_phi_raw(br, z, t, p); };
  const double np = integrate_real([&](double z) { return std::norm(raw(Branch::kPlus, z)); },
                                   branch_window(Branch::kPlus, t, p));
  const double nm = integrate_real([&](double z) { return std::norm(raw(Branch::kMinus, z)); },
                                   branch_window(Branch::kMinus, t, p));
  // The product of the two branches is a Gaussian centred half way between them.
  QuadratureSpec mid = span(0.0, 14.0 * branch_position_std(t, p), 1e-13 * std::sqrt(np * nm));
  const Complex cross =
      integrate_complex([&](double z) { return std::conj(raw(Branch::kPlus, z)) * raw(Branch::kMinus, z); }, mid);
  return (cross / std::sqrt(np * nm)).real();
}

int cmd_validate(const Globals& g, double time_scale, std::ostream& out) {
  if (!(time_scale > 0.0) || !std::isfinite(time_scale)) throw UsageError("validate: --time-scale must be > 0");
  const PhysParams p = load_params(g);
  CheckList checks;
  // A quadrature that cannot converge fails its own check instead of the run.
  auto guarded = [&](const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      checks.items.push_back(Json{{"name", name}, {"kind", "hard"}, {"error", e.what()}, {"pass", false}});
      checks.hard_pass = false;
    }
  };
  auto label = [&](const std::string& name, double t) { return name + " t=" + format_double(t); };

  for (double u : {0.0, 0.5, 1.0, 2.0, 5.0}) {
    const double t = u * time_scale;
    guarded(label("normalization", t), [&] {
      const double dev = std::abs(state_norm(t, p) - 1.0);
      checks.add(label("normalization", t), true, dev, 1e-8, dev < 1e-8);
    });
  }

  for (double u : {1.0, 2.0, 3.0}) {
    const double t = u * time_scale;
    for (Branch br : {Branch::kPlus, Branch::kMinus}) {
      const std::string side = br == Branch::kPlus ? "up" : "down";
      const auto w = branch_window(br, t, p);
      constexpr int kPoints = 4001;
      const double h = (w.upper - w.lower) / (kPoints - 1);
      double best = -1.0, best_z = 0.0;
      for (int i = 0; i < kPoints; ++i) {
        const double z = w.lower + i * h;
        const double v = std::norm(branch_phi(br, z, t, p));
        if (v > best) {
          best = v;
          best_z = z;
        }
      }
      const double miss = std::abs(best_z - branch_center(br, t, p));
      checks.add(label("branch centre " + side, t), true, miss, h, miss <= h, "<=");

      guarded(label("momentum mean " + side, t), [&] {
        const double mean_p = branch_mean_momentum(br, t, p);
        const auto pspec = span(mean_p, 14.0 * branch_momentum_std(p), 1e-300);
        const double first = integrate_real([&](double q) { return q * momentum_pdf(br, q, t, p); }, pspec);
        // Relative to the momentum kick, absolute when there is none.
        const double err = std::abs(first - mean_p) / std::max(branch_momentum_std(p), std::abs(mean_p));
        checks.add(label("momentum mean " + side, t), true, err, 1e-6, err < 1e-6);
      });
    }
  }

  double completeness = 0.0;
  for (Setting s : {Setting::kPositionZ, Setting::kSpinZ, Setting::kSpinX, Setting::kMomentumZ}) {
    for (double u : {0.0, 0.5, 1.0, 2.0, 5.0}) {
      double sum = 0.0;
      for (const auto& op : outcome_probabilities(s, u * time_scale, p)) sum += op.probability;
      completeness = std::max(completeness, std::abs(sum - 1.0));
    }
  }
  checks.add("probability completeness", true, completeness, 1e-12, completeness < 1e-12);

  guarded("spin-x probability law", [&] {
    double law = 0.0;
    for (double u : {0.0, 0.25, 0.5, 1.0, 2.0}) {
      const double t = u * time_scale;
      const double quad = 0.5 * (1.0 + overlap_real_by_quadrature(t, p));
      law = std::max(law, std::abs(quad - outcome_probabilities(Setting::kSpinX, t, p).front().probability));
    }
    checks.add("spin-x probability law", true, law, 1e-9, law < 1e-9);
  });

  // Pointwise, relative to the peak height of the unconditioned density.
  double ensemble = 0.0;
  for (double u : {0.5, 1.0, 2.0}) {
    const double t = u * time_scale;
    const double peak = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * branch_position_std(t, p));
    for (Setting s : {Setting::kSpinZ, Setting::kSpinX}) {
      const auto probs = outcome_probabilities(s, t, p);
      for (double z : branch_grid(t, p, 201)) {
        double mix = 0.0;
        for (const auto& [outcome, prob] : probs) {
          if (prob > 0.0) mix += prob * steered_pdf(collapsed_state(s, outcome, t, p), z);
        }
        ensemble = std::max(ensemble, std::abs(mix - position_pdf_z(z, t, p).total) / peak);
      }
    }
  }
  checks.add("continuous non-signaling", true, ensemble, 1e-9, ensemble < 1e-9);

  const PathSpinState psi = make_psi2();
  std::vector<Assemblage> as;
  for (Setting s : {Setting::kPositionZ, Setting::kSpinZ, Setting::kSpinX}) as.push_back(assemblage(psi, s));
  const double box_dev = nonsignaling_deviation(as);
  checks.add("boxes non-signaling (path marginal)", true, box_dev, 1e-12, box_dev < 1e-12);
  const double full_dev = full_state_average_deviation(as);
  checks.add("boxes full-state average deviation", false, full_dev, 1e-12, full_dev < 1e-12);
  const double distance = steering_distinguishability(as[0], as[2]).value;
  checks.add("steering distinguishability PositionZ vs SpinX", true, distance, 0.86, distance >= 0.86, ">=");

  RunConfig run;
  run.params = p;
  run.n_atoms = 20'000;
  run.evolution_time = time_scale;
  run.seed = g.seed.value_or(0);
  run.schedule = {ScheduleKind::kAlternating,
                  {Setting::kPositionZ, Setting::kSpinZ, Setting::kSpinX, Setting::kMomentumZ}};
  bool conform = true;
  double worst_sigma = 0.0;
  for (const auto& c : conformance(run_experiment(run).tally, run)) {
    conform = conform && c.pass;
    if (c.standard_error > 0.0) worst_sigma = std::max(worst_sigma, std::abs(c.observed - c.expected) / c.standard_error);
  }
  checks.add("sampling conformance (max z-score)", true, worst_sigma, 5.0, conform, "<=");

  // Finite-difference residual of the closed form: informational for the
  // configured field, gated for the field-free reference.
  const double t1 = time_scale;
  const double r256 = schrodinger_residual(t1, default_residual_grid(t1, p, 256), p);
  const double r512 = schrodinger_residual(t1, default_residual_grid(t1, p, 512), p);
  checks.add(label("schrodinger residual (256 points)", t1), false, r256, 1e-4, r256 < 1e-4);
  checks.add(label("schrodinger residual (512 points)", t1), false, r512, 1e-4, r512 < 1e-4);
  PhysParams free = p;
  free.b = 0.0;
  double previous = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  double finest = 0.0;
  for (int points : {64, 128, 256, 512}) {
    finest = schrodinger_residual(t1, default_residual_grid(t1, free, points), free);
    decreasing = decreasing && finest < previous;
    previous = finest;
  }
  checks.add("schrodinger residual b=0 decreases under refinement", true, decreasing ? 1.0 : 0.0, 1.0, decreasing,
             "==");
  checks.add("schrodinger residual b=0 (512 points)", true, finest, 1e-4, finest < 1e-4);

  const Json report{{"command", "validate"}, {"time_scale", time_scale}, {"params", params_json(p)},
                    {"checks", checks.items}, {"pass", checks.hard_pass}};
  emit(g, "validate.json", report.dump(2) + "\n", out);
  return checks.hard_pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stern-Gerlach single-particle steering simulator"};
  app.name("sgsteer");
  app.require_subcommand(1);

  // Global flags are accepted before or after the subcommand.
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "RNG seed (default 0)");
  app.add_option("--params", g.params_file, "key=value file overriding the physical parameters");
  app.add_option("--out", g.out,
                 std::string("output file; relative paths resolve against $") + kOutputDirEnv + " when set");
  app.add_option("--format", g.format, "csv or json (pdf grid, protocol records)")
      ->check(CLI::IsMember({"csv", "json"}));

  PdfOptions pdf;
  auto* pdf_cmd = app.add_subcommand("pdf", "spin-resolved z density on a grid");
  pdf_cmd->add_option("--time,-t", pdf.time, "evolution time");
  pdf_cmd->add_option("--z-min", pdf.z_min, "grid start (default: both branches + 8 sd)");
  pdf_cmd->add_option("--z-max", pdf.z_max, "grid end");
  pdf_cmd->add_option("--points", pdf.points, "grid points (>= 2)");

  MeasureOptions meas;
  auto* measure_cmd = app.add_subcommand("measure", "sample one setting and compare with the Born rule");
  measure_cmd->add_option("--setting,-s", meas.setting, "PositionZ, SpinZ, SpinX or MomentumZ")->required();
  measure_cmd->add_option("--time,-t", meas.time, "evolution time");
  measure_cmd->add_option("-n,--samples", meas.samples, "number of samples");

  auto* boxes_cmd = app.add_subcommand("boxes", "two-box model assemblages, non-signaling, distinguishability");

  ProtocolOptions proto;
  auto* protocol_cmd = app.add_subcommand("protocol", "run the Alice-Bob protocol and tally the records");
  protocol_cmd->add_option("--config", proto.config_file, "run configuration file");
  protocol_cmd->add_option("--n-atoms,-n", proto.n_atoms, "number of atoms");
  protocol_cmd->add_option("--settings", proto.settings, "comma-separated settings")->delimiter(',');
  protocol_cmd->add_option("--schedule", proto.schedule, "fixed, alternating or random");
  protocol_cmd->add_option("--time,-t", proto.time, "evolution time");
  protocol_cmd->add_option("--model", proto.model, "continuous or boxes");
  protocol_cmd->add_option("--threads", proto.threads, "worker threads");

  double time_scale = 1.0;
  auto* validate_cmd = app.add_subcommand("validate", "run the invariant checks");
  validate_cmd->add_option("--time-scale", time_scale, "unit for the check times (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "sgsteer: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (pdf_cmd->parsed()) return cmd_pdf(g, pdf, out);
    if (measure_cmd->parsed()) return cmd_measure(g, meas, out);
    if (boxes_cmd->parsed()) return cmd_boxes(g, out);
    if (protocol_cmd->parsed()) return cmd_protocol(g, proto, out);
    if (validate_cmd->parsed()) return cmd_validate(g, time_scale, out);
  } catch (const UsageError& e) {
    err << "sgsteer: " << e.what() << '\n';
    return kExitUsage;
  } catch (const QuadratureError& e) {
    err << "sgsteer: " << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const std::domain_error& e) {
    err << "sgsteer: " << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    err << "sgsteer: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace sgsteer::cli
