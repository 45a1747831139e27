#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "rolechain/metrics.hpp"
#include "support/oracle.hpp"

using namespace rolechain;

namespace {

TimelineRow row(std::uint64_t tx_id, double start, double done, double confirmed,
                std::uint64_t height) {
  TimelineRow r;
  r.tx_id = tx_id;
  r.kind = TxKind::CheckAccess;
  r.exe_start_ms = start;
  r.exe_done_ms = done;
  r.confirmed_ms = confirmed;
  r.block_height = height;
  r.cpu_us = 305;
  r.net_bytes = 104;
  return r;
}

constexpr double kTol = 1e-12;

}  // namespace

TEST_CASE("rows are attributed to the peer that minted their block") {
  TimelineRow r;
  r.block_height = 0;
  CHECK(peer_of_row(r, 4, 6) == 0);
  r.block_height = 5;
  CHECK(peer_of_row(r, 4, 6) == 0);
  r.block_height = 6;
  CHECK(peer_of_row(r, 4, 6) == 1);
  r.block_height = 23;
  CHECK(peer_of_row(r, 4, 6) == 3);
  r.block_height = 24;
  CHECK(peer_of_row(r, 4, 6) == 0);  // wraps to the first peer
}

TEST_CASE("confirmation lag measures batch end to confirmation") {
  // one transaction finishing execution at 100 ms, confirmed at 500 ms
  std::vector<TimelineRow> rows{row(1, 90, 100, 500, 1)};
  auto lag = mean_block_confirm_lag_s(rows, 0, 1'000, 1, 6);
  REQUIRE(lag.ok());
  CHECK(lag.value.value() == doctest::Approx(0.4).epsilon(kTol));

  SUBCASE("confirmation exactly at the batch end means zero lag") {
    rows[0].confirmed_ms = 100;
    auto zero = mean_block_confirm_lag_s(rows, 0, 1'000, 1, 6);
    REQUIRE(zero.ok());
    CHECK(zero.value.value() == doctest::Approx(0.0).epsilon(kTol));
  }
  SUBCASE("the batch end is the latest execution finish in the block") {
    rows.push_back(row(2, 100, 120, 500, 1));
    // block batch ends at 120: lags are 0.4 and 0.38 averaged per block
    auto lag2 = mean_block_confirm_lag_s(rows, 0, 1'000, 1, 6);
    REQUIRE(lag2.ok());
    CHECK(lag2.value.value() == doctest::Approx(0.38).epsilon(kTol));
  }
}

TEST_CASE("execution time averages per-transaction durations") {
  std::vector<TimelineRow> rows{row(1, 0, 2, 500, 1)};
  auto exec = mean_execution_time_s(rows, 0, 1'000, 1, 6);
  REQUIRE(exec.ok());
  CHECK(exec.value.value() == doctest::Approx(0.002).epsilon(kTol));

  SUBCASE("several durations average arithmetically") {
    rows = {row(1, 0, 1, 500, 1), row(2, 1, 3, 500, 1), row(3, 3, 6, 500, 1)};
    auto mean = mean_execution_time_s(rows, 0, 1'000, 1, 6);
    REQUIRE(mean.ok());
    CHECK(mean.value.value() == doctest::Approx(0.002).epsilon(kTol));
  }
  SUBCASE("per-peer means average across engaged peers") {
    // peer 0 (height 1) sees a 2 ms transaction, peer 1 (height 6) a 4 ms one
    rows = {row(1, 0, 2, 500, 1), row(2, 0, 4, 3'500, 6)};
    auto mean = mean_execution_time_s(rows, 0, 10'000, 2, 6);
    REQUIRE(mean.ok());
    CHECK(mean.value.value() == doctest::Approx(0.003).epsilon(kTol));
  }
}

TEST_CASE("throughput counts confirmed transactions per second per peer") {
  std::vector<TimelineRow> rows;
  for (int i = 0; i < 100; ++i)
    rows.push_back(row(i + 1, 0, 1, 100.0 + i, 1));
  auto tps = mean_throughput_tps(rows, 0, 10'000, 1, 6);
  REQUIRE(tps.ok());
  CHECK(tps.value.value() == doctest::Approx(10.0).epsilon(kTol));

  SUBCASE("an empty window is zero, not an error") {
    auto empty = mean_throughput_tps({}, 0, 10'000, 4, 6);
    REQUIRE(empty.ok());
    CHECK(empty.value.value() == 0.0);
  }
  SUBCASE("idle peers drag the average down") {
    // 100 tx on peer 0, nothing on peer 1 → (10 + 0) / 2
    auto half = mean_throughput_tps(rows, 0, 10'000, 2, 6);
    REQUIRE(half.ok());
    CHECK(half.value.value() == doctest::Approx(5.0).epsilon(kTol));
  }
  SUBCASE("two busy peers average their rates") {
    std::vector<TimelineRow> both = rows;  // 100 tx on peer 0
    for (int i = 0; i < 200; ++i)
      both.push_back(row(1'000 + i, 0, 1, 200.0 + i, 6));  // peer 1
    auto avg = mean_throughput_tps(both, 0, 10'000, 2, 6);
    REQUIRE(avg.ok());
    CHECK(avg.value.value() == doctest::Approx(15.0).epsilon(kTol));
  }
}

TEST_CASE("window membership is an open-closed interval on confirmation time") {
  std::vector<TimelineRow> rows{row(1, 0, 1, 1'000, 1), row(2, 0, 1, 2'000, 1),
                                row(3, 0, 1, 3'000, 1)};
  // (1000, 3000]: the row confirmed exactly at t_i is excluded, at t_j included
  auto m = compute_window_metrics(rows, 1'000, 3'000, 1, 6);
  REQUIRE(m.ok());
  CHECK(m.value->rows == 2);
  auto all = compute_window_metrics(rows, 999, 3'000, 1, 6);
  REQUIRE(all.ok());
  CHECK(all.value->rows == 3);
}

TEST_CASE("degenerate windows and peerless scenarios are rejected") {
  std::vector<TimelineRow> rows{row(1, 0, 1, 500, 1)};
  CHECK(mean_throughput_tps(rows, 1'000, 1'000, 1, 6).status.code ==
        Errc::DegenerateWindow);
  CHECK(mean_execution_time_s(rows, 2'000, 1'000, 1, 6).status.code ==
        Errc::DegenerateWindow);
  CHECK(compute_window_metrics(rows, 0, 1'000, 0, 6).status.code ==
        Errc::InvalidScenario);
  // lag/exec need at least one engaged peer
  CHECK(mean_block_confirm_lag_s({}, 0, 1'000, 2, 6).status.code ==
        Errc::EmptyWindow);
  CHECK(mean_execution_time_s({}, 0, 1'000, 2, 6).status.code == Errc::EmptyWindow);
}

TEST_CASE("the combined window report mirrors the single statistics") {
  std::vector<TimelineRow> rows{row(1, 90, 100, 500, 1), row(2, 0, 2, 800, 1)};
  auto m = compute_window_metrics(rows, 0, 1'000, 2, 6);
  REQUIRE(m.ok());
  const WindowMetrics& w = m.value.value();
  CHECK(w.rows == 2);
  CHECK(w.engaged_peers == 1);
  REQUIRE(w.block_confirm_lag_s.has_value());
  REQUIRE(w.execution_time_s.has_value());
  CHECK(*w.block_confirm_lag_s ==
        doctest::Approx(mean_block_confirm_lag_s(rows, 0, 1'000, 2, 6).value.value())
            .epsilon(kTol));
  CHECK(w.throughput_tps ==
        doctest::Approx(mean_throughput_tps(rows, 0, 1'000, 2, 6).value.value())
            .epsilon(kTol));

  auto empty = compute_window_metrics(rows, 5'000, 6'000, 2, 6);
  REQUIRE(empty.ok());
  CHECK(empty.value->rows == 0);
  CHECK_FALSE(empty.value->block_confirm_lag_s.has_value());
  CHECK(empty.value->throughput_tps == 0.0);
}

TEST_CASE("timelines round-trip through CSV exactly") {
  std::vector<TimelineRow> rows;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    TimelineRow r;
    r.tx_id = i + 1;
    r.kind = static_cast<TxKind>(i % 9);
    r.exe_start_ms = 1'000.0 * frac(rng);
    r.exe_done_ms = r.exe_start_ms + frac(rng);
    r.confirmed_ms = r.exe_done_ms + 500.0 * frac(rng);
    r.block_height = i / 5;
    r.cpu_us = 100 + i;
    r.net_bytes = 104 + i;
    rows.push_back(r);
  }

  const std::string csv = timeline_to_csv(rows);
  CHECK(csv.rfind("tx_id,kind,exe_start_ms,exe_done_ms,confirmed_ms,"
                  "block_height,cpu_us,net_bytes\n", 0) == 0);

  auto parsed = timeline_from_csv(csv);
  REQUIRE(parsed.ok());
  const auto& back = parsed.value.value();
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].tx_id == rows[i].tx_id);
    CHECK(back[i].kind == rows[i].kind);
    // bit-exact double round-trip, not approximate
    CHECK(back[i].exe_start_ms == rows[i].exe_start_ms);
    CHECK(back[i].exe_done_ms == rows[i].exe_done_ms);
    CHECK(back[i].confirmed_ms == rows[i].confirmed_ms);
    CHECK(back[i].block_height == rows[i].block_height);
    CHECK(back[i].cpu_us == rows[i].cpu_us);
    CHECK(back[i].net_bytes == rows[i].net_bytes);
  }

  const std::string path = "/tmp/rolechain_test_timeline.csv";
  REQUIRE(save_timeline_csv(path, rows).ok());
  auto loaded = load_timeline_csv(path);
  REQUIRE(loaded.ok());
  CHECK(loaded.value->size() == rows.size());
  std::remove(path.c_str());

  CHECK_FALSE(timeline_from_csv("not,a,header\n1,2,3\n").ok());
}

TEST_CASE("window statistics agree with a spreadsheet-style second computation") {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int> height_pick(1, 40);
  std::uniform_real_distribution<double> frac(0.0, 1.0);

  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t peers = 1 + trial % 5;
    const std::uint32_t bpt = 6;
    std::vector<TimelineRow> rows;
    const int n = 5 + trial * 7;
    for (int i = 0; i < n; ++i) {
      const std::uint64_t h = height_pick(rng);
      TimelineRow r = row(i + 1, 0, 0, 0, h);
      const double block_time = 1'000.0 + 500.0 * static_cast<double>(h);
      r.exe_done_ms = block_time - frac(rng);
      r.exe_start_ms = r.exe_done_ms - 0.2 * frac(rng);
      r.confirmed_ms = block_time + 500.0;
      rows.push_back(r);
    }
    const double t_i = 1'000.0, t_j = 25'000.0;

    auto metrics = compute_window_metrics(rows, t_i, t_j, peers, bpt);
    REQUIRE(metrics.ok());
    testing::OracleMetrics expected = testing::oracle_metrics_from_csv(
        timeline_to_csv(rows), t_i, t_j, peers, bpt);

    CAPTURE(trial);
    CHECK(metrics.value->block_confirm_lag_s.has_value() == expected.lag_defined);
    if (expected.lag_defined)
      CHECK(*metrics.value->block_confirm_lag_s ==
            doctest::Approx(expected.lag_s).epsilon(1e-9));
    if (expected.exec_defined)
      CHECK(*metrics.value->execution_time_s ==
            doctest::Approx(expected.exec_s).epsilon(1e-9));
    CHECK(metrics.value->throughput_tps ==
          doctest::Approx(expected.throughput_tps).epsilon(1e-9));
  }
}
