#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rolechain/engine.hpp"
#include "rolechain/metrics.hpp"

namespace rolechain {

/// Reproducible load description. The mix maps transaction-kind names to
/// integer weights; supported kinds are role_assign, permission_assign,
/// check_access, and right_transfer. Access checks use randomized subject
/// identifiers drawn from the seeded generator.
struct BenchScenario {
  std::string name = "scenario";
  std::uint64_t volume = 0;            // generated transactions per repetition
  std::uint32_t producer_count = 4;
  SimMs duration_ms = 10'000;          // simulated span the load is spread over
  std::uint32_t repetitions = 1;
  std::uint64_t seed = 42;
  std::map<std::string, std::uint64_t> mix{{"check_access", 1}};
};

Result<BenchScenario> scenario_from_json(const ordered_json& j);
Result<BenchScenario> load_scenario(const std::string& path);

struct KindTotals {
  std::uint64_t count = 0;
  std::uint64_t cpu_us = 0;
  std::uint64_t net_bytes = 0;
};

struct RepetitionReport {
  std::uint64_t block_count = 0;       // blocks minted for the measured load
  double mean_block_gap_ms = 0.0;      // adjacent block timestamp deltas
  double min_block_gap_ms = 0.0;
  double max_block_gap_ms = 0.0;
  std::uint64_t committed_tx_count = 0;
  std::optional<double> block_confirm_lag_s;
  std::optional<double> execution_time_s;
  double throughput_tps = 0.0;
  std::map<std::string, KindTotals> resource_totals;  // by kind name
  std::uint64_t total_cpu_us = 0;
  std::uint64_t total_net_bytes = 0;
  double wall_ms = 0.0;                // real time the repetition took
  std::vector<TimelineRow> timeline;   // measured rows, for CSV export
};

struct BenchReport {
  BenchScenario scenario;
  std::vector<RepetitionReport> repetitions;
  std::optional<double> mean_block_confirm_lag_s;  // means over repetitions
  std::optional<double> mean_execution_time_s;
  double mean_throughput_tps = 0.0;
  double mean_block_gap_ms = 0.0;

  ordered_json to_json(bool include_timeline = false) const;
};

Result<BenchReport> run_benchmark(const BenchScenario& scenario);

}  // namespace rolechain
