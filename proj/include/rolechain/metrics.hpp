#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rolechain/common.hpp"
#include "rolechain/transaction.hpp"

namespace rolechain {

/// Execution/confirmation trace of one committed transaction. Times are
/// simulated milliseconds; execution spans are sub-millisecond fractions
/// packed so a block's batch finishes exactly at its block timestamp.
struct TimelineRow {
  std::uint64_t tx_id = 0;
  TxKind kind = TxKind::RoleAssign;
  double exe_start_ms = 0.0;
  double exe_done_ms = 0.0;
  double confirmed_ms = 0.0;
  std::uint64_t block_height = 0;
  std::int64_t cpu_us = 0;
  std::int64_t net_bytes = 0;
};

/// Peer that minted the block a row landed in, under round-robin scheduling.
std::size_t peer_of_row(const TimelineRow& row, std::size_t peer_count,
                        std::uint32_t blocks_per_turn);

/// A row belongs to the window (t_i, t_j] iff t_i < confirmed_ms <= t_j.
///
/// Lag and execution statistics are averaged per engaged peer (a peer with at
/// least one row in the window) and then across engaged peers; a window that
/// engages nobody yields EmptyWindow. Throughput averages over every peer,
/// idle ones included, and an empty window simply yields zero.

/// Mean gap, in seconds, between the end of a block's execution batch and the
/// confirmation of its transactions.
Result<double> mean_block_confirm_lag_s(const std::vector<TimelineRow>& rows,
                                        double t_i_ms, double t_j_ms,
                                        std::size_t peer_count,
                                        std::uint32_t blocks_per_turn);

/// Mean per-transaction execution duration in seconds.
Result<double> mean_execution_time_s(const std::vector<TimelineRow>& rows,
                                     double t_i_ms, double t_j_ms,
                                     std::size_t peer_count,
                                     std::uint32_t blocks_per_turn);

/// Mean confirmed transactions per second per peer.
Result<double> mean_throughput_tps(const std::vector<TimelineRow>& rows,
                                   double t_i_ms, double t_j_ms,
                                   std::size_t peer_count,
                                   std::uint32_t blocks_per_turn);

struct WindowMetrics {
  std::optional<double> block_confirm_lag_s;  // absent when the window is empty
  std::optional<double> execution_time_s;     // absent when the window is empty
  double throughput_tps = 0.0;
  std::uint64_t rows = 0;
  std::uint64_t engaged_peers = 0;
};

Result<WindowMetrics> compute_window_metrics(const std::vector<TimelineRow>& rows,
                                             double t_i_ms, double t_j_ms,
                                             std::size_t peer_count,
                                             std::uint32_t blocks_per_turn);

/// CSV with header tx_id,kind,exe_start_ms,exe_done_ms,confirmed_ms,
/// block_height,cpu_us,net_bytes. Doubles round-trip exactly.
std::string timeline_to_csv(const std::vector<TimelineRow>& rows);
Result<std::vector<TimelineRow>> timeline_from_csv(std::string_view text);

Status save_timeline_csv(const std::string& path,
                         const std::vector<TimelineRow>& rows);
Result<std::vector<TimelineRow>> load_timeline_csv(const std::string& path);

}  // namespace rolechain
