#include "rolechain/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace rolechain {
namespace {

constexpr const char* kCsvHeader =
    "tx_id,kind,exe_start_ms,exe_done_ms,confirmed_ms,block_height,cpu_us,net_bytes";

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct WindowIndex {
  // rows in the window, grouped by peer
  std::map<std::size_t, std::vector<const TimelineRow*>> by_peer;
  // latest exe_done_ms per block, over in-window rows
  std::map<std::uint64_t, double> block_done;
  std::uint64_t rows = 0;
};

Status validate_window(double t_i_ms, double t_j_ms, std::size_t peer_count) {
  if (peer_count == 0)
    return Status::fail(Errc::InvalidScenario, "peer count must be positive");
  if (!(t_j_ms > t_i_ms))
    return Status::fail(Errc::DegenerateWindow,
                        "window end must exceed window start");
  return Status::success();
}

WindowIndex index_window(const std::vector<TimelineRow>& rows, double t_i_ms,
                         double t_j_ms, std::size_t peer_count,
                         std::uint32_t blocks_per_turn) {
  WindowIndex idx;
  for (const TimelineRow& r : rows) {
    if (!(t_i_ms < r.confirmed_ms && r.confirmed_ms <= t_j_ms)) continue;
    idx.by_peer[peer_of_row(r, peer_count, blocks_per_turn)].push_back(&r);
    auto [it, fresh] = idx.block_done.emplace(r.block_height, r.exe_done_ms);
    if (!fresh && r.exe_done_ms > it->second) it->second = r.exe_done_ms;
    ++idx.rows;
  }
  return idx;
}

}  // namespace

std::size_t peer_of_row(const TimelineRow& row, std::size_t peer_count,
                        std::uint32_t blocks_per_turn) {
  return static_cast<std::size_t>(
      (row.block_height / blocks_per_turn) % peer_count);
}

Result<double> mean_block_confirm_lag_s(const std::vector<TimelineRow>& rows,
                                        double t_i_ms, double t_j_ms,
                                        std::size_t peer_count,
                                        std::uint32_t blocks_per_turn) {
  using R = Result<double>;
  if (Status s = validate_window(t_i_ms, t_j_ms, peer_count); !s.ok())
    return R::fail(std::move(s));
  WindowIndex idx = index_window(rows, t_i_ms, t_j_ms, peer_count, blocks_per_turn);
  if (idx.by_peer.empty())
    return R::fail(Errc::EmptyWindow, "no transaction confirmed in window");
  double sum_of_peer_means = 0.0;
  for (const auto& [peer, peer_rows] : idx.by_peer) {
    double total = 0.0;
    for (const TimelineRow* r : peer_rows)
      total += (r->confirmed_ms - idx.block_done.at(r->block_height)) / 1000.0;
    sum_of_peer_means += total / static_cast<double>(peer_rows.size());
  }
  return R::success(sum_of_peer_means / static_cast<double>(idx.by_peer.size()));
}

Result<double> mean_execution_time_s(const std::vector<TimelineRow>& rows,
                                     double t_i_ms, double t_j_ms,
                                     std::size_t peer_count,
                                     std::uint32_t blocks_per_turn) {
  using R = Result<double>;
  if (Status s = validate_window(t_i_ms, t_j_ms, peer_count); !s.ok())
    return R::fail(std::move(s));
  WindowIndex idx = index_window(rows, t_i_ms, t_j_ms, peer_count, blocks_per_turn);
  if (idx.by_peer.empty())
    return R::fail(Errc::EmptyWindow, "no transaction confirmed in window");
  double sum_of_peer_means = 0.0;
  for (const auto& [peer, peer_rows] : idx.by_peer) {
    double total = 0.0;
    for (const TimelineRow* r : peer_rows)
      total += (r->exe_done_ms - r->exe_start_ms) / 1000.0;
    sum_of_peer_means += total / static_cast<double>(peer_rows.size());
  }
  return R::success(sum_of_peer_means / static_cast<double>(idx.by_peer.size()));
}

Result<double> mean_throughput_tps(const std::vector<TimelineRow>& rows,
                                   double t_i_ms, double t_j_ms,
                                   std::size_t peer_count,
                                   std::uint32_t blocks_per_turn) {
  using R = Result<double>;
  if (Status s = validate_window(t_i_ms, t_j_ms, peer_count); !s.ok())
    return R::fail(std::move(s));
  WindowIndex idx = index_window(rows, t_i_ms, t_j_ms, peer_count, blocks_per_turn);
  const double window_s = (t_j_ms - t_i_ms) / 1000.0;
  double sum = 0.0;  // idle peers contribute zero
  for (const auto& [peer, peer_rows] : idx.by_peer)
    sum += static_cast<double>(peer_rows.size()) / window_s;
  return R::success(sum / static_cast<double>(peer_count));
}

Result<WindowMetrics> compute_window_metrics(const std::vector<TimelineRow>& rows,
                                             double t_i_ms, double t_j_ms,
                                             std::size_t peer_count,
                                             std::uint32_t blocks_per_turn) {
  using R = Result<WindowMetrics>;
  if (Status s = validate_window(t_i_ms, t_j_ms, peer_count); !s.ok())
    return R::fail(std::move(s));
  WindowMetrics m;
  WindowIndex idx = index_window(rows, t_i_ms, t_j_ms, peer_count, blocks_per_turn);
  m.rows = idx.rows;
  m.engaged_peers = idx.by_peer.size();
  auto lag = mean_block_confirm_lag_s(rows, t_i_ms, t_j_ms, peer_count, blocks_per_turn);
  if (lag.ok()) m.block_confirm_lag_s = *lag.value;
  auto exe = mean_execution_time_s(rows, t_i_ms, t_j_ms, peer_count, blocks_per_turn);
  if (exe.ok()) m.execution_time_s = *exe.value;
  auto tps = mean_throughput_tps(rows, t_i_ms, t_j_ms, peer_count, blocks_per_turn);
  if (!tps.ok()) return R::fail(tps.status);
  m.throughput_tps = *tps.value;
  return R::success(std::move(m));
}

std::string timeline_to_csv(const std::vector<TimelineRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const TimelineRow& r : rows) {
    out << r.tx_id << ',' << tx_kind_name(r.kind) << ','
        << format_double(r.exe_start_ms) << ',' << format_double(r.exe_done_ms)
        << ',' << format_double(r.confirmed_ms) << ',' << r.block_height << ','
        << r.cpu_us << ',' << r.net_bytes << '\n';
  }
  return out.str();
}

Result<std::vector<TimelineRow>> timeline_from_csv(std::string_view text) {
  using R = Result<std::vector<TimelineRow>>;
  std::vector<TimelineRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kCsvHeader)
        return R::fail(Errc::ParseError, "unexpected csv header: " + line);
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8)
      return R::fail(Errc::ParseError,
                     "line " + std::to_string(line_no) + ": expected 8 cells");
    TimelineRow r;
    try {
      r.tx_id = std::stoull(cells[0]);
      auto kind = parse_tx_kind(cells[1]);
      if (!kind)
        return R::fail(Errc::ParseError,
                       "line " + std::to_string(line_no) + ": bad kind " + cells[1]);
      r.kind = *kind;
      r.exe_start_ms = std::stod(cells[2]);
      r.exe_done_ms = std::stod(cells[3]);
      r.confirmed_ms = std::stod(cells[4]);
      r.block_height = std::stoull(cells[5]);
      r.cpu_us = std::stoll(cells[6]);
      r.net_bytes = std::stoll(cells[7]);
    } catch (const std::exception&) {
      return R::fail(Errc::ParseError,
                     "line " + std::to_string(line_no) + ": bad number");
    }
    rows.push_back(r);
  }
  return R::success(std::move(rows));
}

Status save_timeline_csv(const std::string& path,
                         const std::vector<TimelineRow>& rows) {
  std::ofstream out(path);
  if (!out) return Status::fail(Errc::IoError, "cannot open " + path);
  out << timeline_to_csv(rows);
  out.flush();
  if (!out) return Status::fail(Errc::IoError, "write failed: " + path);
  return Status::success();
}

Result<std::vector<TimelineRow>> load_timeline_csv(const std::string& path) {
  using R = Result<std::vector<TimelineRow>>;
  std::ifstream in(path);
  if (!in) return R::fail(Errc::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return timeline_from_csv(buf.str());
}

}  // namespace rolechain
