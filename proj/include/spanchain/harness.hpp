#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "spanchain/aggregation.hpp"
#include "spanchain/deployment.hpp"
#include "spanchain/phy.hpp"
#include "spanchain/protocol.hpp"
#include "spanchain/spanner.hpp"

namespace spanchain {

enum class OutputFormat { kCsv, kJsonLines };
OutputFormat format_from_string(const std::string& name);
std::string to_string(OutputFormat f);

struct ExperimentConfig {
  DeploymentSpec deployment;
  SinrParams sinr;
  AggregationParams agg;
  SpannerConfig spanner;
  ProtocolParams protocol;
  double crash_rate{0.01};  // fraction of n nodes per second
  std::uint64_t epochs{10};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10,
                                   11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
  std::string out_path;
  OutputFormat format{OutputFormat::kCsv};
  bool trace{false};
  bool long_run{false};
  std::string label{"default"};

  void validate() const;  // all module-level invariants, at load

  // flat "key = value" text file; '#' starts a comment
  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_stream(std::istream& is);
  // the CLI flags route through the same keys
  void apply(const std::string& key, const std::string& value);
};

struct TrialMetrics {
  std::uint64_t seed{0};
  std::vector<std::uint64_t> epoch_slots;
  std::uint64_t commits{0};
  std::uint64_t abandons{0};
  std::uint64_t committed_txs{0};
  std::uint64_t total_slots{0};
  std::uint64_t rebuilds{0};
  double gamma{0.0};
  std::uint64_t spanner_levels{0};

  double tps() const;
  double mean_epoch_slots() const;
};

struct RunMetrics {
  std::string label;
  ExperimentConfig config;  // resolved copy used for the run
  std::vector<TrialMetrics> trials;

  std::uint64_t commits() const;
  std::uint64_t abandons() const;
  std::uint64_t committed_txs() const;
  std::uint64_t total_slots() const;
  double mean_epoch_slots() const;
  double tps() const;  // pooled: committed txs / (total slots * 50us)
};

RunMetrics run_experiment(const ExperimentConfig& cfg);

enum class SweepAxis { kN, kGamma, kAlpha, kBeta, kDistribution };
SweepAxis axis_from_string(const std::string& name);

// One run per value, same seed list across rows. The gamma axis takes plane
// extents (gamma itself is emergent from the placement).
std::vector<RunMetrics> sweep(const ExperimentConfig& base, SweepAxis axis,
                              const std::vector<std::string>& values);

void emit(const std::vector<RunMetrics>& rows, std::ostream& os, OutputFormat format);

// minimal CSV reader used for round-trip checks: header row -> column maps
std::vector<std::map<std::string, std::string>> parse_csv(std::istream& is);

}  // namespace spanchain
