#include "rolechain/bench.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <random>

namespace rolechain {

namespace {

const std::map<std::string, TxKind> kSupportedMix = {
    {"role_assign", TxKind::RoleAssign},
    {"permission_assign", TxKind::PermissionAssign},
    {"check_access", TxKind::CheckAccess},
    {"right_transfer", TxKind::RightTransfer},
};

constexpr const char* kBenchRole = "benchrole";
constexpr const char* kGrantor = "grantor";

}  // namespace

Result<BenchScenario> scenario_from_json(const ordered_json& j) {
  using R = Result<BenchScenario>;
  if (!j.is_object()) return R::fail(Errc::ParseError, "scenario must be an object");
  BenchScenario s;
  if (j.contains("name")) s.name = j["name"].get<std::string>();
  if (!j.contains("volume"))
    return R::fail(Errc::ParseError, "scenario missing field volume");
  s.volume = j["volume"].get<std::uint64_t>();
  if (j.contains("producer_count"))
    s.producer_count = j["producer_count"].get<std::uint32_t>();
  if (j.contains("duration_ms")) s.duration_ms = j["duration_ms"].get<SimMs>();
  if (j.contains("repetitions")) s.repetitions = j["repetitions"].get<std::uint32_t>();
  if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("mix")) {
    s.mix.clear();
    for (const auto& [kind, weight] : j["mix"].items())
      s.mix[kind] = weight.get<std::uint64_t>();
  }
  return R::success(std::move(s));
}

Result<BenchScenario> load_scenario(const std::string& path) {
  using R = Result<BenchScenario>;
  std::ifstream in(path);
  if (!in) return R::fail(Errc::IoError, "cannot open " + path);
  ordered_json j = ordered_json::parse(in, nullptr, false);
  if (j.is_discarded()) return R::fail(Errc::ParseError, path + ": bad json");
  return scenario_from_json(j);
}

namespace {

Status validate(const BenchScenario& s) {
  if (s.volume == 0)
    return Status::fail(Errc::InvalidScenario, "volume must be at least 1");
  if (s.producer_count == 0)
    return Status::fail(Errc::InvalidScenario, "producer_count must be at least 1");
  if (s.duration_ms == 0)
    return Status::fail(Errc::InvalidScenario, "duration_ms must be positive");
  if (s.repetitions == 0)
    return Status::fail(Errc::InvalidScenario, "repetitions must be at least 1");
  if (s.mix.empty())
    return Status::fail(Errc::InvalidScenario, "mix must name at least one kind");
  std::uint64_t total_weight = 0;
  for (const auto& [kind, weight] : s.mix) {
    if (!kSupportedMix.count(kind))
      return Status::fail(Errc::InvalidScenario, "unsupported mix kind: " + kind);
    total_weight += weight;
  }
  if (total_weight == 0)
    return Status::fail(Errc::InvalidScenario, "mix weights are all zero");
  return Status::success();
}

/// One repetition: build a fresh chain, spread the load across the span,
/// mint every block the span covers, then measure the trace.
Result<RepetitionReport> run_repetition(const BenchScenario& s, std::uint64_t seed) {
  using R = Result<RepetitionReport>;

  EngineConfig cfg;
  cfg.producers.clear();
  for (std::uint32_t i = 1; i <= s.producer_count; ++i)
    cfg.producers.push_back("producer" + std::to_string(i));
  Engine engine(cfg);

  if (Status st = engine.create_account(cfg.issuer_account, 1'000'000); !st.ok())
    return R::fail(st);
  if (Status st = engine.register_role(kBenchRole); !st.ok()) return R::fail(st);

  const SimMs interval = cfg.block_interval_ms;
  const bool needs_grantor = s.mix.count("right_transfer") > 0;
  SimMs run_start = cfg.genesis_time_ms;

  if (needs_grantor) {
    if (Status st = engine.create_account(kGrantor, 1'000'000); !st.ok())
      return R::fail(st);
    // seed state: the grantor holds the role and the role conveys a right,
    // so transfers are both authorized and meaningful
    RoleAssignPayload assign{kGrantor, kBenchRole};
    SubmitReceipt r1 = engine.submit(cfg.issuer_account, run_start, assign);
    if (!r1.accepted) return R::fail(r1.error);
    Permission seedrow;
    seedrow.identifier = "benchseed";
    seedrow.mode = Mode::AuthPlus;
    seedrow.role = kBenchRole;
    seedrow.action = "read";
    seedrow.target = "document";
    SubmitReceipt r2 =
        engine.submit(cfg.issuer_account, run_start, PermissionAssignPayload{seedrow});
    if (!r2.accepted) return R::fail(r2.error);
    auto produced = engine.produce_block(run_start + interval);
    if (!produced.ok()) return R::fail(produced.status);
    run_start += interval;
  }

  const std::uint64_t block_count = (s.duration_ms + interval - 1) / interval;
  std::mt19937_64 rng(seed);
  std::vector<std::string> kinds;
  std::vector<double> weights;
  for (const auto& [kind, weight] : s.mix)
    if (weight > 0) {
      kinds.push_back(kind);
      weights.push_back(static_cast<double>(weight));
    }
  std::discrete_distribution<std::size_t> pick_kind(weights.begin(), weights.end());
  std::uniform_int_distribution<std::uint64_t> random_subject(0, 999'999);

  const auto wall_start = std::chrono::steady_clock::now();

  RepetitionReport rep;
  std::uint64_t counter = 0;
  std::uint64_t next_tx = 0;
  const std::uint64_t first_measured_height = engine.ledger().height() + 1;
  for (std::uint64_t b = 1; b <= block_count; ++b) {
    const SimMs block_time = run_start + b * interval;
    // everything scheduled before this block's slot arrives in its batch
    while (next_tx < s.volume &&
           run_start + next_tx * s.duration_ms / s.volume <= block_time) {
      const SimMs at = run_start + next_tx * s.duration_ms / s.volume;
      const std::string& kind = kinds[pick_kind(rng)];
      SubmitReceipt receipt;
      if (kind == "check_access") {
        CheckAccessPayload p;
        p.subject_id = "subj" + std::to_string(random_subject(rng));
        p.operation = "read";
        p.object = "document";
        receipt = engine.submit(cfg.issuer_account, at, std::move(p));
      } else if (kind == "role_assign") {
        receipt = engine.submit(
            cfg.issuer_account, at,
            RoleAssignPayload{"sub" + std::to_string(counter), kBenchRole});
      } else if (kind == "permission_assign") {
        Permission row;
        row.identifier = "perm" + std::to_string(counter);
        row.mode = Mode::AuthPlus;
        row.role = kBenchRole;
        row.action = "read";
        row.target = "object" + std::to_string(counter);
        receipt = engine.submit(cfg.issuer_account, at,
                                PermissionAssignPayload{std::move(row)});
      } else {  // right_transfer
        RightTransferPayload p;
        p.delegator = kGrantor;
        p.delegate = "dlg" + std::to_string(counter);
        p.role = kBenchRole;
        receipt = engine.submit(kGrantor, at, std::move(p));
      }
      if (!receipt.accepted) return R::fail(receipt.error);
      auto& slot = rep.resource_totals[kind];
      slot.count += 1;
      slot.cpu_us += static_cast<std::uint64_t>(receipt.cpu_charged_us);
      slot.net_bytes += static_cast<std::uint64_t>(receipt.net_charged_bytes);
      rep.total_cpu_us += static_cast<std::uint64_t>(receipt.cpu_charged_us);
      rep.total_net_bytes += static_cast<std::uint64_t>(receipt.net_charged_bytes);
      ++counter;
      ++next_tx;
    }
    auto produced = engine.produce_block(block_time);
    if (!produced.ok()) return R::fail(produced.status);
  }

  const auto wall_end = std::chrono::steady_clock::now();
  rep.wall_ms = std::chrono::duration<double, std::milli>(wall_end - wall_start).count();
  rep.block_count = block_count;

  const std::vector<Block>& blocks = engine.ledger().blocks();
  double min_gap = 0.0, max_gap = 0.0, sum_gap = 0.0;
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    const double gap = static_cast<double>(blocks[i].timestamp_ms) -
                       static_cast<double>(blocks[i - 1].timestamp_ms);
    if (i == 1) min_gap = max_gap = gap;
    min_gap = std::min(min_gap, gap);
    max_gap = std::max(max_gap, gap);
    sum_gap += gap;
  }
  rep.mean_block_gap_ms = blocks.size() > 1 ? sum_gap / (blocks.size() - 1) : 0.0;
  rep.min_block_gap_ms = min_gap;
  rep.max_block_gap_ms = max_gap;

  for (const TimelineRow& row : engine.timeline())
    if (row.block_height >= first_measured_height) rep.timeline.push_back(row);
  rep.committed_tx_count = rep.timeline.size();

  const double t_i = static_cast<double>(run_start);
  const double t_j = static_cast<double>(run_start + block_count * interval);
  auto metrics = compute_window_metrics(rep.timeline, t_i, t_j, s.producer_count,
                                        cfg.blocks_per_turn);
  if (!metrics.ok()) return R::fail(metrics.status);
  rep.block_confirm_lag_s = metrics.value->block_confirm_lag_s;
  rep.execution_time_s = metrics.value->execution_time_s;
  rep.throughput_tps = metrics.value->throughput_tps;
  return R::success(std::move(rep));
}

}  // namespace

Result<BenchReport> run_benchmark(const BenchScenario& scenario) {
  using R = Result<BenchReport>;
  if (Status st = validate(scenario); !st.ok()) return R::fail(st);

  BenchReport report;
  report.scenario = scenario;
  for (std::uint32_t rep = 0; rep < scenario.repetitions; ++rep) {
    auto r = run_repetition(scenario, scenario.seed + rep);
    if (!r.ok()) return R::fail(r.status);
    report.repetitions.push_back(std::move(*r.value));
  }

  double lag_sum = 0.0, exec_sum = 0.0, tps_sum = 0.0, gap_sum = 0.0;
  std::size_t lag_n = 0, exec_n = 0;
  for (const RepetitionReport& rep : report.repetitions) {
    if (rep.block_confirm_lag_s) {
      lag_sum += *rep.block_confirm_lag_s;
      ++lag_n;
    }
    if (rep.execution_time_s) {
      exec_sum += *rep.execution_time_s;
      ++exec_n;
    }
    tps_sum += rep.throughput_tps;
    gap_sum += rep.mean_block_gap_ms;
  }
  if (lag_n > 0) report.mean_block_confirm_lag_s = lag_sum / lag_n;
  if (exec_n > 0) report.mean_execution_time_s = exec_sum / exec_n;
  report.mean_throughput_tps = tps_sum / report.repetitions.size();
  report.mean_block_gap_ms = gap_sum / report.repetitions.size();
  return R::success(std::move(report));
}

ordered_json BenchReport::to_json(bool include_timeline) const {
  ordered_json j;
  ordered_json sc;
  sc["name"] = scenario.name;
  sc["volume"] = scenario.volume;
  sc["producer_count"] = scenario.producer_count;
  sc["duration_ms"] = scenario.duration_ms;
  sc["repetitions"] = scenario.repetitions;
  sc["seed"] = scenario.seed;
  ordered_json mix;
  for (const auto& [kind, weight] : scenario.mix) mix[kind] = weight;
  sc["mix"] = std::move(mix);
  j["scenario"] = std::move(sc);

  ordered_json reps = ordered_json::array();
  for (const RepetitionReport& rep : repetitions) {
    ordered_json r;
    r["block_count"] = rep.block_count;
    r["mean_block_gap_ms"] = rep.mean_block_gap_ms;
    r["min_block_gap_ms"] = rep.min_block_gap_ms;
    r["max_block_gap_ms"] = rep.max_block_gap_ms;
    r["committed_tx_count"] = rep.committed_tx_count;
    if (rep.block_confirm_lag_s)
      r["block_confirm_lag_s"] = *rep.block_confirm_lag_s;
    else
      r["block_confirm_lag_s"] = nullptr;
    if (rep.execution_time_s)
      r["execution_time_s"] = *rep.execution_time_s;
    else
      r["execution_time_s"] = nullptr;
    r["throughput_tps"] = rep.throughput_tps;
    ordered_json totals;
    for (const auto& [kind, slot] : rep.resource_totals) {
      ordered_json t;
      t["count"] = slot.count;
      t["cpu_us"] = slot.cpu_us;
      t["net_bytes"] = slot.net_bytes;
      totals[kind] = std::move(t);
    }
    r["resource_totals"] = std::move(totals);
    r["total_cpu_us"] = rep.total_cpu_us;
    r["total_net_bytes"] = rep.total_net_bytes;
    r["wall_ms"] = rep.wall_ms;
    if (include_timeline) r["timeline_csv"] = timeline_to_csv(rep.timeline);
    reps.push_back(std::move(r));
  }
  j["repetitions"] = std::move(reps);

  ordered_json means;
  if (mean_block_confirm_lag_s)
    means["block_confirm_lag_s"] = *mean_block_confirm_lag_s;
  else
    means["block_confirm_lag_s"] = nullptr;
  if (mean_execution_time_s)
    means["execution_time_s"] = *mean_execution_time_s;
  else
    means["execution_time_s"] = nullptr;
  means["throughput_tps"] = mean_throughput_tps;
  means["block_gap_ms"] = mean_block_gap_ms;
  j["means"] = std::move(means);
  return j;
}

}  // namespace rolechain
