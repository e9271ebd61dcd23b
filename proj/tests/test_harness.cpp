#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spanchain/harness.hpp"

using namespace spanchain;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.deployment.n = 21;
  cfg.deployment.plane_w = 20;
  cfg.deployment.plane_h = 20;
  cfg.agg.sigma = 2.0;
  cfg.agg.certified = false;
  cfg.crash_rate = 0.0;
  cfg.epochs = 2;
  cfg.seeds = {1, 2, 3};
  return cfg;
}

}  // namespace

TEST_CASE("tps arithmetic") {
  TrialMetrics t;
  t.committed_txs = 0;
  t.total_slots = 500;
  CHECK(t.tps() == 0.0);
  t.committed_txs = 1000;
  t.total_slots = 20000;
  t.epoch_slots = {20000};
  CHECK(t.tps() == doctest::Approx(1000.0));  // 1000 / (20000 * 50us)
}

TEST_CASE("config file parsing, overrides and validation") {
  std::istringstream file(
      "# experiment\n"
      "distribution = normal\n"
      "n = 64\n"
      "plane_w = 44\n"
      "plane_h = 44\n"
      "alpha = 4\n"
      "param_mode = empirical\n"
      "sigma = 2\n"
      "crash_rate = 0.02\n"
      "epochs = 3\n"
      "seeds = 5, 6\n"
      "format = json-lines\n");
  ExperimentConfig cfg = ExperimentConfig::from_stream(file);
  CHECK(cfg.deployment.distribution == Distribution::kNormal);
  CHECK(cfg.deployment.n == 64);
  CHECK(cfg.sinr.alpha == 4.0);
  CHECK_FALSE(cfg.agg.certified);
  CHECK(cfg.crash_rate == 0.02);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{5, 6});
  CHECK(cfg.format == OutputFormat::kJsonLines);
  CHECK_NOTHROW(cfg.validate());

  cfg.apply("beta", "2.5");
  CHECK(cfg.sinr.beta == 2.5);
  CHECK_THROWS_AS(cfg.apply("no_such_key", "1"), std::invalid_argument);

  ExperimentConfig bad = small_config();
  bad.deployment.n = 2000;  // needs long_run
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.long_run = true;
  CHECK_NOTHROW(bad.validate());

  ExperimentConfig bad_params = small_config();
  bad_params.agg.certified = true;
  bad_params.agg.sigma = 10.0;  // below the certified bound
  CHECK_THROWS_AS(bad_params.validate(), std::invalid_argument);

  std::istringstream broken("n 21\n");
  CHECK_THROWS_AS(ExperimentConfig::from_stream(broken), std::invalid_argument);

  {
    const std::string path = "/tmp/spanchain_cfg_test.txt";
    std::ofstream out(path);
    out << "n = 33\nplane_w = 30\nplane_h = 30\nparam_mode = empirical\n";
    out.close();
    ExperimentConfig from_disk = ExperimentConfig::from_file(path);
    CHECK(from_disk.deployment.n == 33);
    CHECK_FALSE(from_disk.agg.certified);
  }
  CHECK_THROWS_AS(ExperimentConfig::from_file("/nonexistent/cfg.txt"),
                  std::runtime_error);
}

TEST_CASE("run_experiment aggregates trials in seed order") {
  ExperimentConfig cfg = small_config();
  RunMetrics r = run_experiment(cfg);
  REQUIRE(r.trials.size() == 3);
  CHECK(r.trials[0].seed == 1);
  CHECK(r.trials[1].seed == 2);
  CHECK(r.trials[2].seed == 3);
  CHECK(r.commits() == 6);  // crash-free: every epoch commits
  CHECK(r.abandons() == 0);
  CHECK(r.committed_txs() == 6 * cfg.deployment.n);
  CHECK(r.tps() > 0.0);
}

TEST_CASE("emitted csv round-trips and satisfies the tps identity") {
  ExperimentConfig cfg = small_config();
  RunMetrics r = run_experiment(cfg);

  std::stringstream out;
  emit({r}, out, OutputFormat::kCsv);
  auto rows = parse_csv(out);
  REQUIRE(rows.size() == 1);
  const auto& row = rows[0];
  CHECK(row.at("label") == "default");
  CHECK(row.at("n") == "21");
  CHECK(std::stoull(row.at("commits")) == r.commits());
  CHECK(std::stoull(row.at("total_slots")) == r.total_slots());

  // throughput identity on the emitted values themselves
  const double tps = std::stod(row.at("tps"));
  const double recomputed = std::stod(row.at("committed_txs")) /
                            (std::stod(row.at("total_slots")) * kSlotSeconds);
  CHECK(std::abs(tps - recomputed) / recomputed <= 1e-6 + 1e-9);

  // in-memory tps at full precision obeys the identity to 1e-9
  const double exact = double(r.committed_txs()) / (double(r.total_slots()) * kSlotSeconds);
  CHECK(std::abs(r.tps() - exact) / exact <= 1e-9);
}

TEST_CASE("emitted json-lines parse back") {
  ExperimentConfig cfg = small_config();
  cfg.epochs = 1;
  cfg.seeds = {4};
  RunMetrics r = run_experiment(cfg);
  std::stringstream out;
  emit({r}, out, OutputFormat::kJsonLines);
  std::string line;
  REQUIRE(std::getline(out, line));
  nlohmann::json j = nlohmann::json::parse(line);
  CHECK(j["n"] == 21);
  CHECK(j["commits"] == r.commits());
  CHECK(j["total_slots"] == r.total_slots());
}

TEST_CASE("empty metrics emit a header-only file") {
  std::stringstream out;
  emit({}, out, OutputFormat::kCsv);
  auto rows = parse_csv(out);
  CHECK(rows.empty());
  CHECK(out.str().rfind("label,", 0) == 0);
}

TEST_CASE("identical config and seeds give byte-identical output") {
  ExperimentConfig cfg = small_config();
  std::stringstream a, b;
  emit({run_experiment(cfg)}, a, OutputFormat::kCsv);
  emit({run_experiment(cfg)}, b, OutputFormat::kCsv);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("nan") == std::string::npos);
}

TEST_CASE("sweep reuses the seed list across rows") {
  ExperimentConfig cfg = small_config();
  cfg.epochs = 1;
  std::vector<RunMetrics> rows = sweep(cfg, SweepAxis::kDistribution,
                                       {"uniform", "normal", "exponential"});
  REQUIRE(rows.size() == 3);
  for (const RunMetrics& r : rows) {
    REQUIRE(r.trials.size() == cfg.seeds.size());
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
      CHECK(r.trials[i].seed == cfg.seeds[i]);
    }
  }
  CHECK(rows[0].label == "distribution=uniform");
  CHECK(rows[1].label == "distribution=normal");
  CHECK(rows[2].label == "distribution=exponential");

  std::vector<RunMetrics> n_rows = sweep(cfg, SweepAxis::kN, {"11", "21"});
  CHECK(n_rows[0].config.deployment.n == 11);
  CHECK(n_rows[1].config.deployment.n == 21);

  std::vector<RunMetrics> g_rows = sweep(cfg, SweepAxis::kGamma, {"18", "36"});
  CHECK(g_rows[0].config.deployment.plane_w == 18.0);
  CHECK(g_rows[1].trials[0].gamma > g_rows[0].trials[0].gamma);
}

TEST_CASE("epoch logs and traces are written when tracing is on") {
  ExperimentConfig cfg = small_config();
  cfg.epochs = 1;
  cfg.seeds = {9};
  cfg.trace = true;
  cfg.out_path = "/tmp/spanchain_trace_test";
  RunMetrics r = run_experiment(cfg);
  CHECK(r.commits() == 1);

  std::ifstream epochs("/tmp/spanchain_trace_test.seed9.epochs.csv");
  REQUIRE(epochs.good());
  std::string header;
  std::getline(epochs, header);
  CHECK(header == "epoch,outcome,leader,epoch_slots,committed_txs,faulty_count");
  std::string row;
  CHECK(std::getline(epochs, row));

  std::ifstream trace("/tmp/spanchain_trace_test.seed9.trace.csv");
  REQUIRE(trace.good());
  std::getline(trace, header);
  CHECK(header == "slot,event,node,detail");
}
