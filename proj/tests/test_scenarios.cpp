#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <functional>

#include "netgame/error.hpp"
#include "netgame/scenarios.hpp"
#include "oracles.hpp"

using namespace netgame;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = NETGAME_SCENARIO_DIR;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::IoError;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("netgame_test_scenarios_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CournotParams random_cournot(oracle::Draws& d, Eigen::Index n) {
  CournotParams p;
  p.alpha = d.vector(n, 0.5, 5.0);
  p.d = d.vector(n, 0.1, 3.0);
  p.beta = d.uniform(0.05, 0.5);
  p.P = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && d.coin()) p.P(i, j) = d.uniform(0.0, 1.0);
  p.action_set = ConstraintSet::uniform_box(static_cast<std::size_t>(n), 0.0, kInf);
  p.intervention_set = ConstraintSet::uniform_box(static_cast<std::size_t>(n), -2.0, 0.0);
  return p;
}

}  // namespace

TEST_CASE("cournot_to_game maps substitutability to negative coupling") {
  CournotParams p;
  p.alpha = Vector::Constant(10, 3.0);
  p.d = Vector::Constant(10, 1.0);
  p.beta = 0.2;
  p.P = Matrix::Zero(10, 10);
  p.P(0, 1) = 0.5;
  p.action_set = ConstraintSet::uniform_box(10, 0.0, kInf);
  p.intervention_set = ConstraintSet::uniform_box(10, -2.0, 0.0);
  const auto g = cournot_to_game(p);
  CHECK(g.a() == -0.2);
  CHECK((g.b() - Vector::Constant(10, 2.0)).norm() == 0.0);
  CHECK(g.intervention_set() == ConstraintSet::uniform_box(10, -2.0, 0.0));
  CHECK(g.P() == p.P);

  p.beta = 0.0;
  CHECK(code_of([&] { cournot_to_game(p); }) == ErrorCode::InvalidGame);
  p.beta = 0.2;
  p.d[3] = 0.0;
  CHECK(code_of([&] { cournot_to_game(p); }) == ErrorCode::InvalidGame);
}

TEST_CASE("Cournot profit equals the network payoff on random markets") {
  oracle::Draws d(404);
  for (int k = 0; k < 1000; ++k) {
    const auto n = d.integer(2, 8);
    const auto p = random_cournot(d, n);
    const auto g = cournot_to_game(p);
    const Vector x = d.vector(n, 0.0, 5.0);
    const auto i = static_cast<std::size_t>(d.integer(0, static_cast<int>(n) - 1));
    const double u = d.uniform(-2.0, 0.0);
    // Price built from its own definition, independent of the library helper.
    double rivals = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != static_cast<Eigen::Index>(i)) rivals += p.P(static_cast<Eigen::Index>(i), j) * x[j];
    }
    const auto ii = static_cast<Eigen::Index>(i);
    const double price = p.alpha[ii] - 0.5 * (x[ii] + 2.0 * p.beta * rivals);
    const double profit = x[ii] * price - x[ii] * p.d[ii] + x[ii] * u;
    CHECK(cournot_price(p, i, x) == doctest::Approx(price).epsilon(1e-14));
    CHECK(std::abs(cournot_profit(p, i, x, u) - profit) <= 1e-12 * (1.0 + std::abs(profit)));
    CHECK(std::abs(payoff(g, i, x, u) - profit) <= 1e-12 * (1.0 + std::abs(profit)));
  }
}

TEST_CASE("random_game hits the requested margin on both coupling signs") {
  for (int sign : {1, -1}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      RandomGameOptions o;
      o.n = 2 + seed % 9;
      o.density = 0.3 + 0.01 * static_cast<double>(seed);
      o.a_sign = sign;
      o.margin = 0.3;
      o.seed = seed;
      o.symmetric = seed % 2 == 0;
      const auto g = random_game(o);
      const auto report = check_assumptions(g);
      CHECK(report.assumption2_ok);
      CHECK(std::abs(report.margin - 0.3) <= 1e-9);
      CHECK((sign > 0 ? g.a() > 0 : g.a() < 0));
      CHECK(g.P().diagonal().norm() == 0.0);
      CHECK(g.P().minCoeff() >= 0.0);
      CHECK(g.P().maxCoeff() <= 1.0);
      if (o.symmetric) CHECK(g.symmetric());
      // Independent eigensolve of P + P^T.
      const Matrix S = g.P() + g.P().transpose();
      const Vector eig = Eigen::EigenSolver<Matrix>(S).eigenvalues().real();
      const double extreme = sign > 0 ? eig.maxCoeff() : eig.minCoeff();
      CHECK(1.0 - g.a() * extreme == doctest::Approx(0.3).epsilon(1e-9));
    }
  }
}

TEST_CASE("random_game is deterministic in the seed") {
  const auto a = random_game(10, 0.5, -1, 0.3, 77);
  const auto b = random_game(10, 0.5, -1, 0.3, 77);
  const auto c = random_game(10, 0.5, -1, 0.3, 78);
  CHECK(a == b);
  CHECK((a.P().array() == b.P().array()).all());
  CHECK(a.a() == b.a());
  CHECK_FALSE(a == c);
}

TEST_CASE("random_game rejects an empty network and bad arguments") {
  CHECK(code_of([] { random_game(5, 0.0, 1, 0.3, 1); }) == ErrorCode::DegenerateNetwork);
  CHECK(code_of([] { random_game(1, 0.5, 1, 0.3, 1); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { random_game(4, 0.5, 0, 0.3, 1); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { random_game(4, 0.5, 1, 1.5, 1); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("scenario round trip through a file") {
  RandomGameOptions o;
  o.n = 4;
  o.seed = 3;
  o.action_set = ConstraintSet::box({{0.0, kInf}, {-1.0, 2.5}, {-kInf, 0.0}, {-kInf, kInf}});
  o.intervention_set = ConstraintSet::ball(4, 1.5);
  ScenarioSpec spec{.label = "round trip",
                    .game = random_game(o),
                    .protocol = ProtocolKind::Dynamic,
                    .x_s = Vector::Constant(4, 0.1),
                    .skip_target_check = true,
                    .sim = SimConfig{.h = 5e-4, .t_max = 12.5, .conv_tol = 1e-7, .record_stride = 3},
                    .x0 = oracle::Draws(9).vector(4, -1, 1),
                    .x_opt_reference = Vector::Constant(4, 1.0 / 3.0)};
  const fs::path file = scratch_dir("roundtrip") / "spec.json";
  save_scenario(spec, file);
  CHECK(load_scenario(file) == spec);

  for (const auto& set : {ConstraintSet::subspace(4, {1, 3}), ConstraintSet::full(4),
                          ConstraintSet::uniform_box(4, -2.0, 0.0)}) {
    spec.game = spec.game.with_intervention_set(set);
    save_scenario(spec, file);
    CHECK(load_scenario(file) == spec);
  }
}

TEST_CASE("loading reports the offending field or invariant") {
  const fs::path dir = scratch_dir("errors");
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return dir / name;
  };
  const std::string tail = R"(, "action_set": {"kind": "full"}, "intervention_set": {"kind": "full"},
                              "protocol": "open_loop"})";
  const auto self_loop = write("self_loop.json", R"({"n": 2, "P": [[0.5, 1], [1, 0]], "a": 0.25, "b": [1, 1])" + tail);
  CHECK(code_of([&] { load_scenario(self_loop); }) == ErrorCode::SelfLoopForbidden);

  const auto short_b = write("short_b.json", R"({"n": 2, "P": [[0, 1], [1, 0]], "a": 0.25, "b": [1])" + tail);
  try {
    load_scenario(short_b);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("b") != std::string::npos);
  }

  const auto syntax = write("syntax.json", "{\n  \"n\": 2,\n  \"P\": [[0, 1],\n}");
  try {
    load_scenario(syntax);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }

  const auto bad_protocol = write("proto.json", R"({"n": 2, "P": [[0, 1], [1, 0]], "a": 0.25, "b": [1, 1],
    "action_set": {"kind": "full"}, "intervention_set": {"kind": "full"}, "protocol": "pid"})");
  CHECK(code_of([&] { load_scenario(bad_protocol); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { load_scenario(dir / "missing.json"); }) == ErrorCode::IoError);
}

TEST_CASE("bundled cournot_taxes scenario satisfies its premises") {
  const auto spec = load_scenario(kScenarios / "cournot_taxes.json");
  const auto& g = spec.game;
  CHECK(g.size() == 10);
  CHECK(g.a() == -0.2);
  CHECK_FALSE(g.symmetric());
  CHECK(g.intervention_set() == ConstraintSet::uniform_box(10, -2.0, 0.0));
  const auto report = analyze_game(g);
  CHECK(report.assumptions.assumption2_ok);
  REQUIRE(report.verdict.has_value());
  CHECK(report.verdict->feasible);
  REQUIRE(spec.x_opt_reference.has_value());
  CHECK((*report.x_opt - *spec.x_opt_reference).norm() < 1e-8);
  // Mixed optimum: some firms produce nothing, others are interior.
  int at_bound = 0;
  for (Eigen::Index i = 0; i < 10; ++i) at_bound += (*report.x_opt)[i] <= 1e-9 ? 1 : 0;
  CHECK(at_bound > 0);
  CHECK(at_bound < 10);
}

TEST_CASE("bundled symmetric scenario suits the adaptive protocol") {
  const auto spec = load_scenario(kScenarios / "cournot_symmetric.json");
  CHECK(spec.game.symmetric());
  CHECK(spec.game.action_set().is_whole_space());
  CHECK(spec.game.intervention_set().is_whole_space());
  CHECK(spec.protocol == ProtocolKind::Adaptive);
  CHECK((social_optimum(spec.game).x - *spec.x_opt_reference).norm() < 1e-8);
}

TEST_CASE("trajectory CSV has 2n + 3 columns and shortest round-trip numbers") {
  Trajectory t;
  t.times = {0.0, 0.1};
  t.x_states = {Vector::Constant(3, 0.1), Vector::Constant(3, 1.0 / 3.0)};
  t.u_values = {Vector::Zero(3), Vector::Constant(3, -2.5)};
  t.lyapunov = {1.0, 0.5};
  t.vi_residuals = {0.25, 1e-300};
  const std::string csv = trajectory_csv(t);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x_1,x_2,x_3,u_1,u_2,u_3,V,residual");
  while (std::getline(in, line)) CHECK(std::count(line.begin(), line.end(), ',') == 8);
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
