#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spanchain/harness.hpp"

namespace {

using spanchain::ExperimentConfig;

// Flags mirror the config keys one-to-one; values given on the command line
// win over the file.
void add_config_flags(CLI::App* cmd, std::vector<std::pair<std::string, std::string>>* overrides) {
  static const char* kKeys[] = {
      "distribution", "n", "plane_w", "plane_h", "normal_sigma_frac",
      "exp_mean_frac", "resample_budget", "alpha", "beta", "noise", "sigma",
      "mu", "p_hat_floor", "param_mode", "spanner_mode", "c_span", "contend_p",
      "s", "tx_per_node", "invalid_rate", "crash_rate", "epochs", "label"};
  for (const char* key : kKeys) {
    cmd->add_option_function<std::string>(
        "--" + std::string(key),
        [overrides, key](const std::string& v) { overrides->emplace_back(key, v); },
        "config key " + std::string(key));
  }
}

std::string resolve_out_path(const std::string& out) {
  if (out.empty() || out.front() == '/') return out;
  const char* dir = std::getenv("SPANCHAIN_OUT_DIR");
  if (dir == nullptr || *dir == '\0') return out;
  std::string d(dir);
  if (d.back() != '/') d.push_back('/');
  return d + out;
}

int write_rows(const std::vector<spanchain::RunMetrics>& rows, const ExperimentConfig& cfg) {
  if (cfg.out_path.empty()) {
    spanchain::emit(rows, std::cout, cfg.format);
    return 0;
  }
  std::ofstream out(cfg.out_path);
  if (!out) {
    std::cerr << "error: cannot write " << cfg.out_path << "\n";
    return 1;
  }
  spanchain::emit(rows, out, cfg.format);
  std::cerr << "wrote " << rows.size() << " row(s) to " << cfg.out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slot-synchronous wireless blockchain simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string seed_list;
  std::string out_path;
  std::string format;
  bool trace = false;
  bool long_run = false;
  std::vector<std::pair<std::string, std::string>> overrides;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "flat key=value config file");
    cmd->add_option("--seed-list", seed_list, "comma-separated trial seeds");
    cmd->add_option("--out", out_path, "output path (default: stdout)");
    cmd->add_option("--format", format, "csv or json-lines");
    cmd->add_flag("--trace", trace, "write per-trial slot traces and epoch logs");
    cmd->add_flag("--long-run", long_run, "allow n > 1000");
    add_config_flags(cmd, &overrides);
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run one experiment configuration");
  add_common(run_cmd);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run one configuration per axis value");
  add_common(sweep_cmd);
  std::string axis;
  std::string values;
  sweep_cmd->add_option("--axis", axis, "n | gamma | alpha | beta | distribution")
      ->required();
  sweep_cmd->add_option("--values", values, "comma-separated axis values")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = config_path.empty()
                               ? ExperimentConfig{}
                               : ExperimentConfig::from_file(config_path);
    for (const auto& [key, value] : overrides) cfg.apply(key, value);
    if (!seed_list.empty()) cfg.apply("seeds", seed_list);
    if (!format.empty()) cfg.apply("format", format);
    if (trace) cfg.trace = true;
    if (long_run) cfg.long_run = true;
    if (!out_path.empty()) cfg.out_path = out_path;
    cfg.out_path = resolve_out_path(cfg.out_path);
    cfg.validate();

    std::vector<spanchain::RunMetrics> rows;
    if (run_cmd->parsed()) {
      rows.push_back(spanchain::run_experiment(cfg));
    } else {
      std::vector<std::string> vals;
      std::stringstream ss(values);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) vals.push_back(item);
      }
      rows = spanchain::sweep(cfg, spanchain::axis_from_string(axis), vals);
    }
    return write_rows(rows, cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
