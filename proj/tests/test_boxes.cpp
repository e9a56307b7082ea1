#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sgsteer/boxes.hpp"

using namespace sgsteer;

namespace {

constexpr Setting kBoxSettings[] = {Setting::kPositionZ, Setting::kSpinZ, Setting::kSpinX};

Vector4c basis(int index) {
  Vector4c v = Vector4c::Zero();
  v[index] = 1.0;
  return v;
}

double max_abs(const Matrix2c& m) { return m.cwiseAbs().maxCoeff(); }

// Assemblage with the post-measurement states left unnormalised, i.e. the
// renormalisation by the outcome probability dropped.
Assemblage corrupted_assemblage(const PathSpinState& state, Setting setting) {
  Assemblage out;
  out.setting = setting;
  for (OutcomeLabel label : box_outcomes(setting)) {
    const Vector4c projected = box_projector(setting, label) * state.amplitudes;
    out.members.push_back({label, projected.squaredNorm(), DensityMatrix4(projected * projected.adjoint())});
  }
  return out;
}

}  // namespace

TEST_CASE("make_psi2") {
  const PathSpinState psi = make_psi2();
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_NOTHROW(psi.validate());
  const double c0 = 1.0 / std::sqrt(2.0);
  CHECK(psi.amplitudes[kParisUp] == Complex{c0, 0.0});
  CHECK(psi.amplitudes[kTokyoDown] == Complex{c0, 0.0});
  CHECK(psi.amplitudes[kParisDown] == Complex{});
  CHECK(psi.amplitudes[kTokyoUp] == Complex{});

  const DensityMatrix4 rho = DensityMatrix4::pure(psi);
  CHECK(max_abs(rho.path_marginal() - 0.5 * Matrix2c::Identity()) < 1e-15);
  CHECK(max_abs(rho.spin_marginal() - 0.5 * Matrix2c::Identity()) < 1e-15);
}

TEST_CASE("PathSpinState validation") {
  PathSpinState bad;
  bad.amplitudes[0] = 0.9;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(product_state(Eigen::Vector2cd::Zero(), Eigen::Vector2cd(1, 0)), std::invalid_argument);
}

TEST_CASE("project examples") {
  const PathSpinState psi = make_psi2();
  SUBCASE("spin-z minus collapses to Tokyo down") {
    const Projection pr = project(psi, Setting::kSpinZ, OutcomeLabel::kMinus);
    CHECK(pr.probability == doctest::Approx(0.5).epsilon(1e-15));
    REQUIRE(pr.state.has_value());
    CHECK((pr.state->amplitudes - basis(kTokyoDown)).norm() < 1e-15);
  }
  SUBCASE("found at Tokyo collapses to Tokyo down") {
    const Projection pr = project(psi, Setting::kPositionZ, OutcomeLabel::kTokyo);
    CHECK(pr.probability == doctest::Approx(0.5).epsilon(1e-15));
    REQUIRE(pr.state.has_value());
    CHECK((pr.state->amplitudes - basis(kTokyoDown)).norm() < 1e-15);
  }
  SUBCASE("spin-x plus leaves a path superposition with up_x") {
    const Projection pr = project(psi, Setting::kSpinX, OutcomeLabel::kPlus);
    CHECK(pr.probability == doctest::Approx(0.5).epsilon(1e-15));
    REQUIRE(pr.state.has_value());
    const PathSpinState expected = product_state(Eigen::Vector2cd(1, 1), Eigen::Vector2cd(1, 1));
    CHECK(std::abs(std::abs(expected.amplitudes.dot(pr.state->amplitudes)) - 1.0) < 1e-15);
  }
  SUBCASE("zero-probability outcome has no state") {
    const PathSpinState paris_up = product_state(Eigen::Vector2cd(1, 0), Eigen::Vector2cd(1, 0));
    const Projection pr = project(paris_up, Setting::kSpinZ, OutcomeLabel::kMinus);
    CHECK(pr.probability == 0.0);
    CHECK_FALSE(pr.state.has_value());
  }
  SUBCASE("momentum is not a box setting") {
    CHECK_THROWS_AS(project(psi, Setting::kMomentumZ, OutcomeLabel::kTokyo), std::invalid_argument);
    CHECK_THROWS_AS(project(psi, Setting::kSpinZ, OutcomeLabel::kTokyo), std::invalid_argument);
  }
}

TEST_CASE("projectors are complete orthogonal idempotents") {
  for (Setting s : kBoxSettings) {
    const auto outcomes = box_outcomes(s);
    const Matrix4c p0 = box_projector(s, outcomes[0]);
    const Matrix4c p1 = box_projector(s, outcomes[1]);
    CHECK((p0 + p1 - Matrix4c::Identity()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((p0 * p0 - p0).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((p0 * p1).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((p0 - p0.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("assemblage examples") {
  const PathSpinState psi = make_psi2();
  SUBCASE("position") {
    const Assemblage a = assemblage(psi, Setting::kPositionZ);
    REQUIRE(a.members.size() == 2);
    CHECK(a.members[0].label == OutcomeLabel::kTokyo);
    CHECK(a.members[0].probability == doctest::Approx(0.5));
    CHECK(std::abs(a.members[0].state.matrix()(kTokyoDown, kTokyoDown) - 1.0) < 1e-15);
    CHECK(a.members[1].label == OutcomeLabel::kParis);
    CHECK(std::abs(a.members[1].state.matrix()(kParisUp, kParisUp) - 1.0) < 1e-15);
  }
  SUBCASE("spin-x members are equal-weight superpositions") {
    const Assemblage a = assemblage(psi, Setting::kSpinX);
    for (const auto& m : a.members) {
      CHECK(m.probability == doctest::Approx(0.5));
      CHECK(max_abs(m.state.path_marginal() - 0.5 * Matrix2c::Identity()) > 0.4);  // path coherence survives
      CHECK(m.state.path_marginal()(0, 0).real() == doctest::Approx(0.5));
    }
  }
}

TEST_CASE("Born completeness and purity preservation") {
  RngStream rng(17, 0);
  std::vector<PathSpinState> states{make_psi2(), product_state(Eigen::Vector2cd(1, 0), Eigen::Vector2cd(1, 1))};
  for (int i = 0; i < 50; ++i) {
    PathSpinState s;
    for (int k = 0; k < 4; ++k) s.amplitudes[k] = Complex{rng.normal(), rng.normal()};
    s.amplitudes.normalize();
    states.push_back(s);
  }
  for (const auto& state : states) {
    for (Setting s : kBoxSettings) {
      const Assemblage a = assemblage(state, s);
      double total = 0.0;
      for (const auto& m : a.members) {
        total += m.probability;
        if (m.probability > 0.0) {
          CHECK(m.state.purity() == doctest::Approx(1.0).epsilon(1e-10));
          CHECK(m.state.trace() == doctest::Approx(1.0).epsilon(1e-12));
          CHECK(m.state.hermiticity_error() < 1e-12);
          CHECK(m.state.min_eigenvalue() > -1e-10);
        }
      }
      CHECK(std::abs(total - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("non-signaling") {
  const std::vector<Setting> all(std::begin(kBoxSettings), std::end(kBoxSettings));
  SUBCASE("psi2 across all settings") { CHECK(nonsignaling_check(make_psi2(), all) < 1e-12); }
  SUBCASE("Paris x up_x product state") {
    const PathSpinState s = product_state(Eigen::Vector2cd(1, 0), Eigen::Vector2cd(1, 1));
    CHECK(nonsignaling_check(s, all) < 1e-12);
  }
  SUBCASE("random states") {
    // Spin measurements never touch the path marginal. A position measurement
    // keeps the occupations but erases any Paris/Tokyo coherence, which psi2
    // does not have.
    RngStream rng(31, 2);
    for (int i = 0; i < 100; ++i) {
      PathSpinState s;
      for (int k = 0; k < 4; ++k) s.amplitudes[k] = Complex{rng.normal(), rng.normal()};
      s.amplitudes.normalize();
      CHECK(nonsignaling_check(s, {Setting::kSpinZ, Setting::kSpinX}) < 1e-12);
      const Matrix2c before = DensityMatrix4::pure(s).path_marginal();
      const Matrix2c after = assemblage(s, Setting::kPositionZ).average().path_marginal();
      CHECK(std::abs(before(0, 0) - after(0, 0)) < 1e-12);
      CHECK(std::abs(after(0, 1)) < 1e-15);
    }
  }
  SUBCASE("corrupted assemblage is caught") {
    const PathSpinState psi = make_psi2();
    const double deviation = nonsignaling_deviation(
        {assemblage(psi, Setting::kPositionZ), corrupted_assemblage(psi, Setting::kSpinX)});
    CHECK(deviation > 0.1);
  }
  SUBCASE("full 4x4 averages keep the spin-x path coherence") {
    std::vector<Assemblage> as;
    for (Setting s : kBoxSettings) as.push_back(assemblage(make_psi2(), s));
    CHECK(full_state_average_deviation(as) == doctest::Approx(0.25).epsilon(1e-12));
    // Position and spin-z alone agree on the full state.
    CHECK(full_state_average_deviation({as[0], as[1]}) < 1e-15);
  }
  SUBCASE("needs two settings") {
    CHECK_THROWS_AS(nonsignaling_check(make_psi2(), {Setting::kSpinZ}), std::invalid_argument);
  }
}

TEST_CASE("trace_distance") {
  const PathSpinState a = product_state(Eigen::Vector2cd(1, 0), Eigen::Vector2cd(1, 0));
  const PathSpinState b = product_state(Eigen::Vector2cd(1, 1), Eigen::Vector2cd(1, 1));
  const double brute = trace_distance(DensityMatrix4::pure(a), DensityMatrix4::pure(b));
  CHECK(brute == doctest::Approx(oracle::pure_trace_distance(a.amplitudes, b.amplitudes)).epsilon(1e-14));
  CHECK(brute == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
  CHECK(trace_distance(DensityMatrix4::pure(a), DensityMatrix4::pure(a)) < 1e-15);
  CHECK(trace_distance(DensityMatrix4::pure(a), DensityMatrix4::pure(b)) ==
        doctest::Approx(trace_distance(DensityMatrix4::pure(b), DensityMatrix4::pure(a))));
}

TEST_CASE("steering_distinguishability") {
  const PathSpinState psi = make_psi2();
  const Assemblage pos = assemblage(psi, Setting::kPositionZ);
  const Assemblage sz = assemblage(psi, Setting::kSpinZ);
  const Assemblage sx = assemblage(psi, Setting::kSpinX);

  SUBCASE("position vs spin-z: the same members") {
    const auto d = steering_distinguishability(pos, sz);
    CHECK(d.value < 1e-15);
    CHECK(d.matrix[0][1] < 1e-15);  // Tokyo vs Minus
    CHECK(d.matrix[1][0] < 1e-15);  // Paris vs Plus
  }
  SUBCASE("position vs spin-x") {
    const auto d = steering_distinguishability(pos, sx);
    const double expected = std::sqrt(3.0) / 2.0;
    CHECK(d.value == doctest::Approx(expected).epsilon(1e-12));
    for (const auto& row : d.matrix)
      for (double v : row) CHECK(v == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("identical settings") {
    CHECK(steering_distinguishability(sx, sx).value < 1e-15);
  }
  SUBCASE("zero-probability members are skipped") {
    const PathSpinState paris_up = product_state(Eigen::Vector2cd(1, 0), Eigen::Vector2cd(1, 0));
    const auto d = steering_distinguishability(assemblage(paris_up, Setting::kPositionZ),
                                               assemblage(paris_up, Setting::kSpinZ));
    CHECK(std::isnan(d.matrix[0][0]));  // Tokyo never happens
    CHECK(d.matrix[1][0] < 1e-15);
    CHECK(std::isnan(d.matrix[1][1]));  // Minus never happens
  }
}

TEST_CASE("box_state_label") {
  const PathSpinState psi = make_psi2();
  const auto label_of = [&](Setting s, OutcomeLabel l) { return box_state_label(*project(psi, s, l).state, s); };
  CHECK(label_of(Setting::kSpinZ, OutcomeLabel::kPlus) ==
        StateLabel{StateForm::kSingleBranchGaussian, SpinLabel::kUpZ, Location::kParis});
  CHECK(label_of(Setting::kPositionZ, OutcomeLabel::kTokyo) ==
        StateLabel{StateForm::kPositionEigenstate, SpinLabel::kDownZ, Location::kTokyo});
  CHECK(label_of(Setting::kSpinX, OutcomeLabel::kMinus) ==
        StateLabel{StateForm::kBranchSuperposition, SpinLabel::kDownX, Location::kDelocalized});
  CHECK_THROWS_AS(box_state_label(psi, Setting::kSpinZ), std::domain_error);
}

TEST_CASE("box labels agree with the continuous collapse for every outcome") {
  const PathSpinState psi = make_psi2();
  const PhysParams p{};
  for (Setting s : kBoxSettings) {
    for (OutcomeLabel l : box_outcomes(s)) {
      CHECK(box_state_label(*project(psi, s, l).state, s) == collapsed_state(s, l, 20.0, p).label());
    }
  }
}

TEST_CASE("spin-x probabilities agree with the continuous model once the branches separate") {
  const PhysParams p{};
  const Assemblage sx = assemblage(make_psi2(), Setting::kSpinX);
  const auto continuous = outcome_probabilities(Setting::kSpinX, 20.0, p);
  REQUIRE(continuous.size() == sx.members.size());
  for (std::size_t i = 0; i < continuous.size(); ++i) {
    CHECK(continuous[i].label == sx.members[i].label);
    CHECK(std::abs(continuous[i].probability - sx.members[i].probability) < 1e-9);
  }
}
