#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sgsteer/protocol.hpp"

using namespace sgsteer;

namespace {

RunConfig config_for(Setting setting, std::uint64_t n, double t, std::uint64_t seed = 1) {
  RunConfig c;
  c.n_atoms = n;
  c.schedule = Schedule::fixed(setting);
  c.evolution_time = t;
  c.seed = seed;
  return c;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("single atom, spin-z") {
  const RunResult r = run_experiment(config_for(Setting::kSpinZ, 1, 1.0, 42));
  REQUIRE(r.records.size() == 1);
  const RunRecord& rec = r.records[0];
  CHECK(rec.atom_index == 0);
  CHECK(rec.setting == Setting::kSpinZ);
  CHECK(rec.seq_control == 0);
  CHECK(rec.seq_result == 1);
  CHECK(rec.bob_state.form == StateForm::kSingleBranchGaussian);
  if (rec.alice_detected) {
    CHECK(rec.alice_value == -0.5);
    CHECK(rec.bob_state.location == Location::kTokyo);
  } else {
    CHECK_FALSE(rec.alice_value.has_value());
    CHECK(rec.bob_state == StateLabel{StateForm::kSingleBranchGaussian, SpinLabel::kUpZ, Location::kParis});
  }
  CHECK(r.tally.n_atoms == 1);
}

TEST_CASE("tallies land on N/2 per side") {
  constexpr std::uint64_t kN = 100'000;
  for (Model model : {Model::kContinuous, Model::kBoxes}) {
    for (Setting s : {Setting::kPositionZ, Setting::kSpinZ, Setting::kMomentumZ}) {
      if (model == Model::kBoxes && s == Setting::kMomentumZ) continue;
      RunConfig c = config_for(s, kN, 3.0, 7);
      c.model = model;
      const RunResult r = run_experiment(c);
      CAPTURE(to_string(s));
      CAPTURE(to_string(model));
      CHECK(r.tally.tokyo + r.tally.paris == kN);
      CHECK(r.tally.delocalized == 0);
      const double sigma = std::sqrt(kN * 0.25);
      CHECK(std::abs(static_cast<double>(r.tally.tokyo) - kN / 2.0) < 5.0 * sigma);
      for (const auto& check : conformance(r.tally, c)) CHECK(check.pass);
    }
  }
}

TEST_CASE("record-level side/spin anticorrelation") {
  for (Model model : {Model::kContinuous, Model::kBoxes}) {
    for (Setting s : {Setting::kPositionZ, Setting::kSpinZ}) {
      RunConfig c = config_for(s, 20'000, 2.0, 3);
      c.model = model;
      for (const auto& rec : run_experiment(c).records) {
        const bool tokyo = rec.bob_state.location == Location::kTokyo;
        CHECK(rec.bob_state.spin == (tokyo ? SpinLabel::kDownZ : SpinLabel::kUpZ));
        CHECK(rec.alice_detected == tokyo);
        CHECK(rec.alice_value.has_value() == rec.alice_detected);
      }
    }
  }
}

TEST_CASE("spin-x: every outcome is detected and Bob's state is delocalised") {
  RunConfig c = config_for(Setting::kSpinX, 20'000, 1.0, 5);
  const RunResult r = run_experiment(c);
  CHECK(r.tally.delocalized == c.n_atoms);
  for (const auto& rec : r.records) {
    CHECK(rec.alice_detected);
    CHECK(rec.bob_state.form == StateForm::kBranchSuperposition);
  }
  for (const auto& check : conformance(r.tally, c)) CHECK(check.pass);
}

TEST_CASE("spin-x at t = 0 gives +hbar/2 for every atom") {
  const RunResult r = run_experiment(config_for(Setting::kSpinX, 10'000, 0.0, 5));
  for (const auto& rec : r.records) CHECK(rec.alice_value == 0.5);
}

TEST_CASE("schedules") {
  RunConfig c = config_for(Setting::kSpinZ, 60'000, 1.0, 11);
  SUBCASE("alternating cycles through the list") {
    c.schedule = {ScheduleKind::kAlternating, {Setting::kPositionZ, Setting::kSpinX, Setting::kMomentumZ}};
    const RunResult r = run_experiment(c);
    for (std::size_t i = 0; i < 9; ++i) CHECK(r.records[i].setting == c.schedule.settings[i % 3]);
    REQUIRE(r.tally.per_setting.size() == 3);
    for (const auto& t : r.tally.per_setting) CHECK(t.trials == 20'000);
  }
  SUBCASE("random draws every listed setting about equally often") {
    c.schedule = {ScheduleKind::kRandom, {Setting::kPositionZ, Setting::kSpinZ}};
    const RunResult r = run_experiment(c);
    const auto* pos = r.tally.find(Setting::kPositionZ);
    REQUIRE(pos != nullptr);
    CHECK(std::abs(static_cast<double>(pos->trials) - 30'000.0) < 5.0 * std::sqrt(60'000 * 0.25));
    CHECK(r.tally.find(Setting::kSpinX) == nullptr);
    // The schedule draw does not share a stream with the measurement draws.
    CHECK(c.setting_for(5) == r.records[5].setting);
  }
}

TEST_CASE("non-signaling at the protocol level") {
  // Bob's side frequencies do not depend on Alice's choice between position
  // and spin-z; spin-x leaves every atom delocalised.
  constexpr std::uint64_t kN = 100'000;
  const RunResult pos = run_experiment(config_for(Setting::kPositionZ, kN, 2.0, 21));
  const RunResult sz = run_experiment(config_for(Setting::kSpinZ, kN, 2.0, 22));
  const double diff = static_cast<double>(pos.tally.paris) - static_cast<double>(sz.tally.paris);
  CHECK(std::abs(diff) < 5.0 * std::sqrt(2.0 * kN * 0.25));
}

TEST_CASE("boxes and continuous runs agree on labels for the same seed") {
  for (Setting s : {Setting::kPositionZ, Setting::kSpinZ}) {
    RunConfig c = config_for(s, 5'000, 4.0, 8);
    const RunResult cont = run_experiment(c);
    c.model = Model::kBoxes;
    const RunResult box = run_experiment(c);
    for (std::size_t i = 0; i < cont.records.size(); ++i) {
      CHECK(cont.records[i].bob_state == box.records[i].bob_state);
      CHECK(cont.records[i].alice_detected == box.records[i].alice_detected);
    }
  }
}

TEST_CASE("determinism and thread independence") {
  RunConfig c = config_for(Setting::kPositionZ, 10'001, 1.5, 99);
  c.schedule = {ScheduleKind::kRandom, {Setting::kPositionZ, Setting::kSpinZ, Setting::kSpinX, Setting::kMomentumZ}};
  const auto a = serialize_records(run_experiment(c).records, RecordFormat::kCsv);
  const auto b = serialize_records(run_experiment(c).records, RecordFormat::kCsv);
  CHECK(a == b);
  c.threads = 7;
  CHECK(serialize_records(run_experiment(c).records, RecordFormat::kCsv) == a);
  c.seed = 100;
  CHECK(serialize_records(run_experiment(c).records, RecordFormat::kCsv) != a);
}

TEST_CASE("record files") {
  RunConfig c = config_for(Setting::kPositionZ, 500, 1.5, 4);
  c.schedule = {ScheduleKind::kAlternating, {Setting::kPositionZ, Setting::kSpinZ, Setting::kSpinX, Setting::kMomentumZ}};
  const RunResult r = run_experiment(c);

  SUBCASE("CSV header is exact") {
    const std::string text = serialize_records(r.records, RecordFormat::kCsv);
    CHECK(text.substr(0, text.find('\n')) ==
          "atom_index,setting,alice_detected,alice_value,bob_form,bob_spin,bob_location,seq_control,seq_result");
  }
  SUBCASE("round trips") {
    for (RecordFormat f : {RecordFormat::kCsv, RecordFormat::kJsonLines}) {
      const std::string text = serialize_records(r.records, f);
      const auto back = parse_records(text, f);
      CHECK(back == r.records);
      CHECK(serialize_records(back, f) == text);
    }
  }
  SUBCASE("null detection is an empty field") {
    const std::string csv = serialize_records({r.records[1]}, RecordFormat::kCsv);
    const std::string json = serialize_records({r.records[1]}, RecordFormat::kJsonLines);
    if (!r.records[1].alice_detected) {
      CHECK(csv.find(",0,,") != std::string::npos);
      CHECK(json.find("\"alice_value\":null") != std::string::npos);
    }
  }
  SUBCASE("byte-identical files") {
    const auto dir = std::filesystem::temp_directory_path() / "sgsteer_test_protocol";
    std::filesystem::create_directories(dir);
    write_records_file((dir / "a.csv").string(), run_experiment(c).records, RecordFormat::kCsv);
    write_records_file((dir / "b.csv").string(), run_experiment(c).records, RecordFormat::kCsv);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    std::filesystem::remove_all(dir);
  }
  SUBCASE("malformed input") {
    CHECK_THROWS_AS(parse_records("atom_index\n", RecordFormat::kCsv), std::invalid_argument);
    CHECK_THROWS_AS(parse_records(std::string(kCsvHeader) + "\n1,SpinZ,2,,a,b,c,0,1\n", RecordFormat::kCsv),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_records("{\"atom_index\":1}\n", RecordFormat::kJsonLines), std::invalid_argument);
    CHECK_THROWS_AS(parse_records("{not json}\n", RecordFormat::kJsonLines), std::invalid_argument);
  }
  SUBCASE("unwritable path") {
    CHECK_THROWS_AS(write_records_file("/nonexistent-dir/x.csv", r.records, RecordFormat::kCsv), std::runtime_error);
  }
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("invalid configurations") {
  RunConfig c = config_for(Setting::kSpinZ, 0, 1.0);
  CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
  c.n_atoms = 10;
  c.schedule.settings.clear();
  CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
  c = config_for(Setting::kMomentumZ, 10, 1.0);
  c.model = Model::kBoxes;
  CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
  c = config_for(Setting::kSpinZ, 10, -1.0);
  CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
  c = config_for(Setting::kSpinZ, 10, 1.0);
  c.params.sigma0 = 0.0;
  CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
  c = config_for(Setting::kSpinZ, 10, 1.0);
  c.threads = 0;
  CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
  CHECK_THROWS_AS(tally_statistics({}), std::invalid_argument);
  CHECK_THROWS_AS(parse_schedule_kind("shuffled"), std::invalid_argument);
  CHECK_THROWS_AS(parse_model("lattice"), std::invalid_argument);
}
