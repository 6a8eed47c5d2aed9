#include <doctest.h>

#include <json.hpp>

#include "cli_runner.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("netgame_test_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string out_flag(const fs::path& dir) { return "--out " + cli::quote(dir.string()); }

}  // namespace

TEST_CASE("analyze writes the report and exits 0 on G2") {
  const auto dir = scratch("analyze_g2");
  const auto r = cli::run("analyze --scenario " + cli::scenario("g2") + " " + out_flag(dir), dir);
  CHECK(r.exit_code == 0);
  const auto j = nlohmann::json::parse(cli::slurp(dir / "analysis.json"));
  CHECK(j["feasible"].get<bool>());
  CHECK(j["margin"].get<double>() > 0.0);
  CHECK(j["x_opt"][0].get<double>() == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(j["u_opt"][1].get<double>() == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("analyze exit codes: missing file, non-unique optimum, infeasible intervention") {
  const auto dir = scratch("analyze_codes");
  const auto missing = cli::run("analyze --scenario " + cli::quote((dir / "none.json").string()) + " " +
                                    out_flag(dir), dir);
  CHECK(missing.exit_code == 1);
  CHECK(missing.stderr_text.find("IoError") != std::string::npos);

  const auto strong = cli::run("analyze --scenario " + cli::scenario("strong_coupling") + " " + out_flag(dir), dir);
  CHECK(strong.exit_code == 2);
  CHECK(fs::exists(dir / "analysis.json"));
  const auto j = nlohmann::json::parse(cli::slurp(dir / "analysis.json"));
  CHECK(j["margin"].get<double>() == doctest::Approx(-1.0));

  const auto infeasible = cli::run("analyze --scenario " + cli::scenario("infeasible_subspace") + " " + out_flag(dir), dir);
  CHECK(infeasible.exit_code == 3);
}

TEST_CASE("simulate exit codes: success, short horizon, violated premise") {
  const auto dir = scratch("simulate_codes");
  const auto ok = cli::run("simulate --scenario " + cli::scenario("g2") + " " + out_flag(dir / "ok"), dir);
  CHECK(ok.exit_code == 0);
  const auto summary = nlohmann::json::parse(cli::slurp(dir / "ok" / "summary.json"));
  CHECK(summary["converged"].get<bool>());
  CHECK(summary["lyapunov_violations"].get<int>() == 0);

  const auto short_run = cli::run("simulate --scenario " + cli::scenario("g2") + " --t-max 1e-3 " +
                                      out_flag(dir / "short"), dir);
  CHECK(short_run.exit_code == 4);

  const auto weak = cli::run("simulate --scenario " + cli::scenario("weak_coupling") +
                                 " --protocol static_feedback " + out_flag(dir / "weak"), dir);
  CHECK(weak.exit_code == 5);
  CHECK(weak.stderr_text.find("WeakCouplingViolated") != std::string::npos);

  const auto bad_flag = cli::run("simulate --scenario " + cli::scenario("g2") + " --h -1", dir);
  CHECK(bad_flag.exit_code == 1);
  const auto bad_protocol = cli::run("simulate --scenario " + cli::scenario("g2") + " --protocol pid " +
                                         out_flag(dir / "pid"), dir);
  CHECK(bad_protocol.exit_code == 1);
}

TEST_CASE("simulate is byte-for-byte deterministic, CSV has 2n + 3 columns") {
  const auto dir = scratch("determinism");
  const std::string args = "simulate --scenario " + cli::scenario("cournot_taxes") + " --seed 11 --stride 50 ";
  REQUIRE(cli::run(args + out_flag(dir / "a"), dir).exit_code == 0);
  REQUIRE(cli::run(args + out_flag(dir / "b"), dir).exit_code == 0);
  for (const char* file : {"trajectory.csv", "summary.json", "analysis.json"}) {
    CHECK(cli::slurp(dir / "a" / file) == cli::slurp(dir / "b" / file));
  }
  std::istringstream csv(cli::slurp(dir / "a" / "trajectory.csv"));
  std::string line;
  while (std::getline(csv, line)) CHECK(std::count(line.begin(), line.end(), ',') == 2 * 10 + 2);
}

TEST_CASE("sweep writes one directory per cell and an index, independent of concurrency") {
  const auto dir = scratch("sweep");
  const std::string args = "sweep --scenario " + cli::scenario("g2") +
                           " --protocols open_loop,static_feedback,dynamic,adaptive --seeds 2 --seed 4 --t-max 200 ";
  const auto serial = cli::run(args + "--jobs 1 " + out_flag(dir / "serial"), dir);
  const auto parallel = cli::run(args + "--jobs 8 " + out_flag(dir / "parallel"), dir);
  CHECK(serial.exit_code == 0);
  CHECK(parallel.exit_code == 0);
  const auto index = nlohmann::json::parse(cli::slurp(dir / "serial" / "index.json"));
  CHECK(index.size() == 8);
  for (const auto& cell : index) {
    CHECK(cell["exit_code"].get<int>() == 0);
    const auto name = cell["dir"].get<std::string>();
    CHECK(cli::slurp(dir / "serial" / name / "trajectory.csv") ==
          cli::slurp(dir / "parallel" / name / "trajectory.csv"));
  }
  CHECK(cli::slurp(dir / "serial" / "index.json") == cli::slurp(dir / "parallel" / "index.json"));
}
