// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qvqt/experiments.hpp"

using namespace qvqt;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

// Small configuration so experiment runs stay in the sub-minute range.
ExperimentConfig tiny(const std::string& id) {
  nlohmann::json j = {{"id", id}, {"n_starts", 2}, {"max_iterations", 40}, {"master_seed", 5}};
  return parse_config(j);
}

std::string csv_string(const ExperimentTable& table, const ExperimentConfig& config) {
  std::ostringstream out;
  write_csv(table, config, out);
  return out.str();
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("defaults are filled per experiment") {
    const ExperimentConfig e1 = parse_config({{"id", "E1_depth_sweep"}});
    CHECK(e1.beta == 1.3);
    CHECK(e1.param_grid == std::vector<int>{12, 20, 36, 52, 76});
    CHECK(e1.n_starts == 100);

    const ExperimentConfig e2 = parse_config({{"id", "E2_beta_sweep"}});
    CHECK(e2.beta_grid.size() == 13);
    CHECK(e2.beta_grid.front() == doctest::Approx(0.1));
    CHECK(e2.beta_grid.back() == doctest::Approx(10.0));

    const ExperimentConfig e4 = parse_config({{"id", "E4_alpha_sweep"}});
    CHECK(e4.beta == 1.0);
    CHECK(e4.alpha_grid.size() == 24);
    CHECK(e4.alpha_grid[6] == doctest::Approx(kPi / 2).epsilon(1e-12));

    const ExperimentConfig e5 = parse_config({{"id", "E5_phase_diagram"}});
    CHECK(e5.temperature_grid.size() == 20);
    CHECK(e5.temperature_grid.front() == doctest::Approx(0.2));
    CHECK(e5.temperature_grid.back() == doctest::Approx(4.0));

    const ExperimentConfig e6 = parse_config({{"id", "E6_chain_scaling"}});
    CHECK(e6.chain_lengths == std::vector<int>{3, 4, 5, 6, 7});
    CHECK(e6.depth_grid == std::vector<int>{1, 2, 3, 4});
  }
  SUBCASE("round trip through to_json is idempotent") {
    nlohmann::json j = {{"id", "E2_beta_sweep"}, {"beta", 2.5},     {"n_starts", 7},
                        {"master_seed", 42},     {"n_qubits", 3},   {"Jx", 0.1}};
    const ExperimentConfig once = parse_config(j);
    const ExperimentConfig twice = parse_config(to_json(once));
    CHECK(to_json(once) == to_json(twice));
    CHECK(config_hash(once) == config_hash(twice));
    CHECK(twice.beta == 2.5);
    CHECK(twice.n_starts == 7);
  }
  SUBCASE("invalid configs are rejected") {
    CHECK_THROWS_AS(parse_config(nlohmann::json::object()), std::invalid_argument);
    CHECK_THROWS_AS(parse_config({{"id", "E7_bogus"}}), std::invalid_argument);
    CHECK_THROWS_AS(parse_config({{"id", "E1_depth_sweep"}, {"beta", -1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config({{"id", "E1_depth_sweep"}, {"n_starts", 0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config({{"id", "E1_depth_sweep"}, {"n_qubits", 0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        parse_config({{"id", "E2_beta_sweep"}, {"beta_grid", {0.5, -0.1}}}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        parse_config({{"id", "E5_phase_diagram"}, {"temperature_grid", {0.0, 1.0}}}),
        std::invalid_argument);
  }
  SUBCASE("config hash is sensitive to every field") {
    const ExperimentConfig base = parse_config({{"id", "E1_depth_sweep"}});
    ExperimentConfig other = base;
    other.master_seed = 99;
    CHECK(config_hash(base) != config_hash(other));
  }
}

TEST_CASE("load_config from disk") {
  const fs::path path = fs::temp_directory_path() / "qvqt_test_config.json";
  {
    std::ofstream out(path);
    out << R"({"id": "E3_iteration_scaling", "n_starts": 4})";
  }
  const ExperimentConfig c = load_config(path.string());
  CHECK(c.id == "E3_iteration_scaling");
  CHECK(c.n_starts == 4);
  fs::remove(path);

  CHECK_THROWS_AS(load_config("/nonexistent/qvqt.json"), std::runtime_error);

  const fs::path bad = fs::temp_directory_path() / "qvqt_bad_config.json";
  {
    std::ofstream out(bad);
    out << "{not json";
  }
  CHECK_THROWS_AS(load_config(bad.string()), std::invalid_argument);
  fs::remove(bad);
}

TEST_CASE("ansatz selection by total parameter count") {
  SUBCASE("reference pair at 76 parameters") {
    const auto [vqc1, vqc2] = ansatz_for_total_params(4, 76);
    CHECK(vqc1.n_params == 12);
    CHECK(vqc2.n_params == 64);
  }
  SUBCASE("minimal pair otherwise") {
    const auto [vqc1, vqc2] = ansatz_for_total_params(4, 12);
    CHECK(vqc1.n_params == 4);
    CHECK(vqc2.n_params == 8);
    const auto [a, b] = ansatz_for_total_params(4, 20);
    CHECK(a.n_params + b.n_params == 20);
    const auto [c, d] = ansatz_for_total_params(3, 15);
    CHECK(c.n_params + d.n_params == 15);
  }
  SUBCASE("unrepresentable totals throw") {
    CHECK_THROWS_AS(ansatz_for_total_params(4, 13), std::invalid_argument);
    CHECK_THROWS_AS(ansatz_for_total_params(4, 4), std::invalid_argument);
  }
}

TEST_CASE("zero crossings by linear interpolation") {
  SUBCASE("piecewise-linear curve has exact roots") {
    const std::vector<double> angles = {0, kPi / 2, kPi, 3 * kPi / 2};
    const std::vector<double> values = {1, -1, -1, 1};
    const std::vector<double> roots = zero_crossings(angles, values);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == doctest::Approx(kPi / 4).epsilon(1e-12));
    CHECK(roots[1] == doctest::Approx(5 * kPi / 4).epsilon(1e-12));
  }
  SUBCASE("exact zero on a grid point") {
    const std::vector<double> roots =
        zero_crossings({0, 1, 2, 3}, {0.0, 1.0, 1.0, 1.0}, false);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0] == doctest::Approx(0.0));
  }
  SUBCASE("wrap-around edge is included only when periodic") {
    const std::vector<double> angles = {0, kPi / 2, kPi, 3 * kPi / 2};
    const std::vector<double> values = {1, 1, 1, -1};
    CHECK(zero_crossings(angles, values, false).size() == 1);
    CHECK(zero_crossings(angles, values, true).size() == 2);
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(zero_crossings({0.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(zero_crossings({0, 1}, {1.0}), std::invalid_argument);
  }
}

TEST_CASE("experiment runs produce well-formed deterministic tables") {
  SUBCASE("E1 with a reduced parameter grid") {
    ExperimentConfig c = tiny("E1_depth_sweep");
    c.param_grid = {12, 20};
    const ExperimentTable t = run_experiment(c);
    CHECK(t.columns.size() == 7);
    CHECK(t.rows.size() == 6);  // best/p20/mean per grid point
    CHECK(t.rows[0][0] == "E1_depth_sweep");
    CHECK(t.rows[0][2] == "best");
    CHECK(csv_string(run_experiment(c), c) == csv_string(t, c));
  }
  SUBCASE("E3 reports the circuit-evaluation count") {
    ExperimentConfig c = tiny("E3_iteration_scaling");
    c.param_grid = {12, 20};
    const ExperimentTable t = run_e3_iteration_scaling(c);
    REQUIRE(t.rows.size() == 2);
    for (const auto& row : t.rows) {
      const double mean_iter = std::stod(row[2]);
      const double evals = std::stod(row[3]);
      const double total = std::stod(row[1]);
      CHECK(evals == doctest::Approx(mean_iter * (2 * total + 1)).epsilon(1e-12));
    }
    bool has_fit = false;
    for (const auto& rec : t.run_records)
      if (rec.contains("linear_fit")) has_fit = true;
    CHECK(has_fit);
  }
  SUBCASE("E4 on a coarse angle grid") {
    ExperimentConfig c = tiny("E4_alpha_sweep");
    c.alpha_grid = {kPi / 4, kPi / 2, kPi};
    c.n_starts = 1;
    const ExperimentTable t = run_e4_alpha_sweep(c);
    REQUIRE(t.rows.size() == 3);
    // exact correlation columns reproduce the Gibbs oracle regardless of
    // how well the variational side converged
    CHECK(std::stod(t.rows[1][4]) == doctest::Approx(-0.647834391146225).epsilon(1e-10));
    CHECK(std::stod(t.rows[1][5]) == doctest::Approx(0.331641202216634).epsilon(1e-10));
    for (const auto& row : t.rows) {
      CHECK(std::stod(row[2]) >= -1.0 - 1e-9);  // model c0 within physical range
      CHECK(std::stod(row[2]) <= 1.0 + 1e-9);
    }
  }
  SUBCASE("E6 on the shortest chain") {
    ExperimentConfig c = tiny("E6_chain_scaling");
    c.chain_lengths = {3};
    c.depth_grid = {1};
    const ExperimentTable t = run_e6_chain_scaling(c);
    REQUIRE(t.rows.size() == 2);  // best + p20
    CHECK(t.rows[0][1] == "3");
    CHECK(std::stod(t.rows[0][4]) >= 0.0);
  }
}

TEST_CASE("E5 reweights one optimization across the temperature grid") {
  ExperimentConfig c = tiny("E5_phase_diagram");
  c.alpha_grid = {kPi / 4, 3 * kPi / 4, 5 * kPi / 4, 7 * kPi / 4};
  c.temperature_grid = {0.5, 1.0, 2.0};
  c.n_starts = 1;
  const ExperimentTable t = run_e5_phase_diagram(c);
  // 4 point rows + 1 crossing row per temperature
  CHECK(t.rows.size() == 3 * 5);
  int crossings = 0;
  for (const auto& row : t.rows) {
    REQUIRE(row.size() == t.columns.size());
    if (row[1] == "crossing") ++crossings;
  }
  CHECK(crossings == 3);
}

TEST_CASE("CSV and JSON outputs") {
  ExperimentConfig c = tiny("E3_iteration_scaling");
  c.param_grid = {12};
  const ExperimentTable t = run_experiment(c);

  SUBCASE("metadata header and byte-stable rows") {
    const std::string csv = csv_string(t, c);
    CHECK(csv.rfind("# qvqt-experiment v1\n", 0) == 0);
    CHECK(csv.find("# id: E3_iteration_scaling") != std::string::npos);
    CHECK(csv.find("# master_seed: 5") != std::string::npos);
    CHECK(csv_string(run_experiment(c), c) == csv);
  }
  SUBCASE("write_outputs creates both files") {
    const fs::path dir = fs::temp_directory_path() / "qvqt_test_out";
    fs::remove_all(dir);
    write_outputs(t, c, dir.string());
    CHECK(fs::exists(dir / "E3_iteration_scaling.csv"));
    CHECK(fs::exists(dir / "E3_iteration_scaling.json"));
    std::ifstream js(dir / "E3_iteration_scaling.json");
    nlohmann::json parsed;
    js >> parsed;
    CHECK(parsed.contains("config"));
    CHECK(parsed.contains("runs"));
    CHECK(parsed["config"]["id"] == "E3_iteration_scaling");
    fs::remove_all(dir);
  }
}

#ifdef QVQT_CLI_PATH
TEST_CASE("command-line interface") {
  const std::string cli = QVQT_CLI_PATH;
  const fs::path dir = fs::temp_directory_path() / "qvqt_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "config.json";
  {
    std::ofstream out(cfg);
    out << R"({"id": "E3_iteration_scaling", "param_grid": [12], "n_starts": 1,)"
        << R"( "max_iterations": 20, "master_seed": 3})";
  }
  auto shell = [](const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };

  CHECK(shell(cli + " validate --config " + cfg.string() + " > /dev/null") == 0);
  CHECK(shell(cli + " validate --config /nonexistent.json 2> /dev/null") == 2);

  const fs::path bad = dir / "bad.json";
  {
    std::ofstream out(bad);
    out << R"({"id": "E9_unknown"})";
  }
  CHECK(shell(cli + " validate --config " + bad.string() + " 2> /dev/null") == 2);

  const fs::path out_dir = dir / "out";
  CHECK(shell(cli + " run --config " + cfg.string() + " --out " + out_dir.string() +
              " > /dev/null") == 0);
  CHECK(fs::exists(out_dir / "E3_iteration_scaling.csv"));

  // --seed overrides the master seed recorded in the CSV metadata
  const fs::path seeded = dir / "seeded";
  CHECK(shell(cli + " run --config " + cfg.string() + " --seed 77 --out " +
              seeded.string() + " > /dev/null") == 0);
  std::ifstream csv(seeded / "E3_iteration_scaling.csv");
  std::string contents((std::istreambuf_iterator<char>(csv)),
                       std::istreambuf_iterator<char>());
  CHECK(contents.find("# master_seed: 77") != std::string::npos);
  fs::remove_all(dir);
}
#endif
