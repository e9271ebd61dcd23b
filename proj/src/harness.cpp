#include "spanchain/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace spanchain {

OutputFormat format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "json-lines") return OutputFormat::kJsonLines;
  throw std::invalid_argument("unknown output format: " + name);
}

std::string to_string(OutputFormat f) {
  return f == OutputFormat::kCsv ? "csv" : "json-lines";
}

SweepAxis axis_from_string(const std::string& name) {
  if (name == "n" || name == "N") return SweepAxis::kN;
  if (name == "gamma") return SweepAxis::kGamma;
  if (name == "alpha") return SweepAxis::kAlpha;
  if (name == "beta") return SweepAxis::kBeta;
  if (name == "distribution") return SweepAxis::kDistribution;
  throw std::invalid_argument("unknown sweep axis: " + name);
}

void ExperimentConfig::validate() const {
  deployment.validate();
  sinr.validate();
  AggregationParams::resolved(agg, sinr);  // throws on invariant violations
  if (spanner.c_span < 1) throw std::invalid_argument("config: c_span must be >= 1");
  if (protocol.s_constant < 1) throw std::invalid_argument("config: s must be >= 1");
  if (protocol.invalid_rate < 0.0 || protocol.invalid_rate > 1.0) {
    throw std::invalid_argument("config: invalid_rate must be in [0, 1]");
  }
  if (crash_rate < 0.0) throw std::invalid_argument("config: crash_rate must be >= 0");
  if (epochs < 1) throw std::invalid_argument("config: epochs must be >= 1");
  if (seeds.empty()) throw std::invalid_argument("config: seed list is empty");
  if (deployment.n > 1000 && !long_run) {
    throw std::invalid_argument("config: n > 1000 requires long_run");
  }
  if (trace && out_path.empty()) {
    throw std::invalid_argument("config: trace output requires an out path");
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config: bad boolean value: " + v);
}

std::vector<std::uint64_t> parse_seed_list(const std::string& v) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    seeds.push_back(std::stoull(item));
  }
  return seeds;
}

std::string fmt_g6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

void ExperimentConfig::apply(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "distribution") {
    deployment.distribution = distribution_from_string(value);
  } else if (key == "n") {
    deployment.n = std::stoull(value);
  } else if (key == "plane_w") {
    deployment.plane_w = std::stod(value);
  } else if (key == "plane_h") {
    deployment.plane_h = std::stod(value);
  } else if (key == "normal_sigma_frac") {
    deployment.normal_sigma_frac = std::stod(value);
  } else if (key == "exp_mean_frac") {
    deployment.exp_mean_frac = std::stod(value);
  } else if (key == "resample_budget") {
    deployment.resample_budget = std::stoi(value);
  } else if (key == "alpha") {
    sinr.alpha = std::stod(value);
  } else if (key == "beta") {
    sinr.beta = std::stod(value);
  } else if (key == "noise") {
    sinr.noise = std::stod(value);
  } else if (key == "sigma") {
    agg.sigma = std::stod(value);
  } else if (key == "mu") {
    agg.mu = std::stod(value);
  } else if (key == "p_hat_floor") {
    agg.p_hat_floor = std::stod(value);
  } else if (key == "param_mode") {
    if (value == "certified") {
      agg.certified = true;
    } else if (value == "empirical") {
      agg.certified = false;
    } else {
      throw std::invalid_argument("config: param_mode must be certified or empirical");
    }
  } else if (key == "spanner_mode") {
    spanner.mode = spanner_mode_from_string(value);
  } else if (key == "c_span") {
    spanner.c_span = std::stoi(value);
  } else if (key == "contend_p") {
    spanner.contend_p = std::stod(value);
  } else if (key == "s") {
    protocol.s_constant = std::stoull(value);
  } else if (key == "tx_per_node") {
    protocol.tx_per_node = static_cast<std::uint32_t>(std::stoul(value));
  } else if (key == "invalid_rate") {
    protocol.invalid_rate = std::stod(value);
  } else if (key == "crash_rate") {
    crash_rate = std::stod(value);
  } else if (key == "epochs") {
    epochs = std::stoull(value);
  } else if (key == "seeds") {
    seeds = parse_seed_list(value);
  } else if (key == "out") {
    out_path = value;
  } else if (key == "format") {
    format = format_from_string(value);
  } else if (key == "trace") {
    trace = parse_bool(value);
  } else if (key == "long_run") {
    long_run = parse_bool(value);
  } else if (key == "label") {
    label = value;
  } else {
    throw std::invalid_argument("config: unknown key: " + key);
  }
}

ExperimentConfig ExperimentConfig::from_stream(std::istream& is) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not key = value");
    }
    cfg.apply(line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  return from_stream(in);
}

double TrialMetrics::tps() const {
  if (total_slots == 0) return 0.0;
  return static_cast<double>(committed_txs) /
         (static_cast<double>(total_slots) * kSlotSeconds);
}

double TrialMetrics::mean_epoch_slots() const {
  if (epoch_slots.empty()) return 0.0;
  return static_cast<double>(total_slots) / static_cast<double>(epoch_slots.size());
}

std::uint64_t RunMetrics::commits() const {
  std::uint64_t c = 0;
  for (const auto& t : trials) c += t.commits;
  return c;
}

std::uint64_t RunMetrics::abandons() const {
  std::uint64_t c = 0;
  for (const auto& t : trials) c += t.abandons;
  return c;
}

std::uint64_t RunMetrics::committed_txs() const {
  std::uint64_t c = 0;
  for (const auto& t : trials) c += t.committed_txs;
  return c;
}

std::uint64_t RunMetrics::total_slots() const {
  std::uint64_t c = 0;
  for (const auto& t : trials) c += t.total_slots;
  return c;
}

double RunMetrics::mean_epoch_slots() const {
  std::uint64_t epochs = 0;
  for (const auto& t : trials) epochs += t.epoch_slots.size();
  if (epochs == 0) return 0.0;
  return static_cast<double>(total_slots()) / static_cast<double>(epochs);
}

double RunMetrics::tps() const {
  const std::uint64_t slots = total_slots();
  if (slots == 0) return 0.0;
  return static_cast<double>(committed_txs()) /
         (static_cast<double>(slots) * kSlotSeconds);
}

namespace {

TrialMetrics run_trial(const ExperimentConfig& cfg, const AggregationParams& agg,
                       const SpannerConfig& spanner_cfg, std::uint64_t trial_seed) {
  DeploymentSpec spec = cfg.deployment;
  spec.seed = mix_seed(trial_seed, tag_of("placement"));
  NodePlacement placement = NodePlacement::generate(spec);

  std::unique_ptr<RateCrashes> crashes;
  if (cfg.crash_rate > 0.0) {
    crashes = std::make_unique<RateCrashes>(cfg.crash_rate, placement.size(),
                                            mix_seed(trial_seed, tag_of("crash")));
  }

  std::unique_ptr<std::ofstream> trace_file;
  std::unique_ptr<TraceSink> trace;
  std::unique_ptr<std::ofstream> epoch_log;
  if (cfg.trace) {
    trace_file = std::make_unique<std::ofstream>(
        cfg.out_path + ".seed" + std::to_string(trial_seed) + ".trace.csv");
    trace = std::make_unique<TraceSink>(*trace_file);
    epoch_log = std::make_unique<std::ofstream>(
        cfg.out_path + ".seed" + std::to_string(trial_seed) + ".epochs.csv");
    *epoch_log << "epoch,outcome,leader,epoch_slots,committed_txs,faulty_count\n";
  }

  Trial trial(placement, cfg.sinr, agg, spanner_cfg, cfg.protocol, crashes.get(),
              trial_seed, trace.get());

  TrialMetrics m;
  m.seed = trial_seed;
  m.gamma = placement.gamma();
  for (std::uint64_t e = 0; e < cfg.epochs; ++e) {
    EpochResult r = trial.run_epoch();
    m.epoch_slots.push_back(r.epoch_slots);
    m.total_slots += r.epoch_slots;
    m.rebuilds += r.rebuilds;
    if (r.outcome == EpochOutcome::kCommitted) {
      ++m.commits;
      m.committed_txs += r.committed_txs;
    } else {
      ++m.abandons;
    }
    if (epoch_log) {
      *epoch_log << trial.epoch_index() << ','
                 << (r.outcome == EpochOutcome::kCommitted ? "committed" : "abandoned")
                 << ',' << r.leader << ',' << r.epoch_slots << ',' << r.committed_txs
                 << ',' << r.faulty_count << '\n';
    }
  }
  m.spanner_levels = trial.last_spanner_levels();
  return m;
}

}  // namespace

RunMetrics run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const AggregationParams agg = AggregationParams::resolved(cfg.agg, cfg.sinr);
  SpannerConfig spanner_cfg = cfg.spanner;
  if (spanner_cfg.contend_p <= 0.0) spanner_cfg.contend_p = agg.p();

  RunMetrics out;
  out.label = cfg.label;
  out.config = cfg;
  out.config.agg = agg;
  out.trials.resize(cfg.seeds.size());

  const std::size_t workers =
      std::min<std::size_t>(cfg.seeds.size(),
                            std::max<unsigned>(1, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfg.seeds.size()) return;
      try {
        out.trials[i] = run_trial(cfg, agg, spanner_cfg, cfg.seeds[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lk(failure_mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<RunMetrics> sweep(const ExperimentConfig& base, SweepAxis axis,
                              const std::vector<std::string>& values) {
  if (values.empty()) throw std::invalid_argument("sweep: no axis values");
  std::vector<RunMetrics> rows;
  rows.reserve(values.size());
  for (const std::string& v : values) {
    ExperimentConfig cfg = base;
    switch (axis) {
      case SweepAxis::kN:
        cfg.deployment.n = std::stoull(v);
        cfg.label = "n=" + v;
        break;
      case SweepAxis::kGamma:
        cfg.deployment.plane_w = std::stod(v);
        cfg.deployment.plane_h = std::stod(v);
        cfg.label = "extent=" + v;
        break;
      case SweepAxis::kAlpha:
        cfg.sinr.alpha = std::stod(v);
        cfg.label = "alpha=" + v;
        break;
      case SweepAxis::kBeta:
        cfg.sinr.beta = std::stod(v);
        cfg.label = "beta=" + v;
        break;
      case SweepAxis::kDistribution:
        cfg.deployment.distribution = distribution_from_string(v);
        cfg.label = "distribution=" + v;
        break;
    }
    rows.push_back(run_experiment(cfg));
  }
  return rows;
}

void emit(const std::vector<RunMetrics>& rows, std::ostream& os, OutputFormat format) {
  static const char* kColumns =
      "label,distribution,n,plane_w,plane_h,alpha,beta,sigma,mu,crash_rate,"
      "epochs,trials,commits,abandons,total_slots,committed_txs,mean_epoch_slots,tps";
  if (format == OutputFormat::kCsv) {
    os << kColumns << '\n';
    for (const RunMetrics& r : rows) {
      os << r.label << ',' << to_string(r.config.deployment.distribution) << ','
         << r.config.deployment.n << ',' << fmt_g6(r.config.deployment.plane_w) << ','
         << fmt_g6(r.config.deployment.plane_h) << ',' << fmt_g6(r.config.sinr.alpha)
         << ',' << fmt_g6(r.config.sinr.beta) << ',' << fmt_g6(r.config.agg.sigma)
         << ',' << fmt_g6(r.config.agg.mu) << ',' << fmt_g6(r.config.crash_rate) << ','
         << r.config.epochs << ',' << r.trials.size() << ',' << r.commits() << ','
         << r.abandons() << ',' << r.total_slots() << ',' << r.committed_txs() << ','
         << fmt_g6(r.mean_epoch_slots()) << ',' << fmt_g6(r.tps()) << '\n';
    }
    return;
  }
  for (const RunMetrics& r : rows) {
    nlohmann::json j;
    j["label"] = r.label;
    j["distribution"] = to_string(r.config.deployment.distribution);
    j["n"] = r.config.deployment.n;
    j["plane_w"] = std::stod(fmt_g6(r.config.deployment.plane_w));
    j["plane_h"] = std::stod(fmt_g6(r.config.deployment.plane_h));
    j["alpha"] = std::stod(fmt_g6(r.config.sinr.alpha));
    j["beta"] = std::stod(fmt_g6(r.config.sinr.beta));
    j["sigma"] = std::stod(fmt_g6(r.config.agg.sigma));
    j["mu"] = std::stod(fmt_g6(r.config.agg.mu));
    j["crash_rate"] = std::stod(fmt_g6(r.config.crash_rate));
    j["epochs"] = r.config.epochs;
    j["trials"] = r.trials.size();
    j["commits"] = r.commits();
    j["abandons"] = r.abandons();
    j["total_slots"] = r.total_slots();
    j["committed_txs"] = r.committed_txs();
    j["mean_epoch_slots"] = std::stod(fmt_g6(r.mean_epoch_slots()));
    j["tps"] = std::stod(fmt_g6(r.tps()));
    os << j.dump() << '\n';
  }
}

std::vector<std::map<std::string, std::string>> parse_csv(std::istream& is) {
  std::vector<std::map<std::string, std::string>> rows;
  std::string line;
  if (!std::getline(is, line)) return rows;
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string c;
    std::map<std::string, std::string> row;
    std::size_t i = 0;
    while (std::getline(ss, c, ',')) {
      if (i < cols.size()) row[cols[i]] = c;
      ++i;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace spanchain
