#include "rolechain/parallel.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>

namespace rolechain {

std::vector<Decision> decide_batch_serial(const PolicyView& view,
                                          const std::vector<AccessRequest>& requests) {
  std::vector<Decision> decisions(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i)
    decisions[i] = view.decide(requests[i]);
  return decisions;
}

std::vector<Decision> decide_batch_parallel(const PolicyView& view,
                                            const std::vector<AccessRequest>& requests) {
  std::vector<Decision> decisions(requests.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(requests.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    decisions[static_cast<std::size_t>(i)] =
        view.decide(requests[static_cast<std::size_t>(i)]);
  return decisions;
}

std::vector<Violation> sod_scan_serial(const ConstraintSet& constraints,
                                       const PolicyView& view, SimMs at_ms) {
  return constraints.scan_all(view, at_ms);
}

std::vector<Violation> sod_scan_parallel(const ConstraintSet& constraints,
                                         const PolicyView& view, SimMs at_ms) {
  struct Shard {
    const SodRule* rule;
    std::optional<std::string> fix_first;  // pinned first-variable value
  };
  std::vector<Shard> shards;
  for (const SodRule& rule : constraints.rules()) {
    std::vector<std::string> domain =
        constraints.first_variable_domain(view, rule, nullptr);
    if (domain.empty()) {
      shards.push_back({&rule, std::nullopt});  // variable-free body
      continue;
    }
    for (std::string& value : domain) shards.push_back({&rule, std::move(value)});
  }

  std::vector<std::vector<Violation>> per_shard(shards.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(shards.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Shard& shard = shards[static_cast<std::size_t>(i)];
    const std::string* fix = shard.fix_first ? &*shard.fix_first : nullptr;
    per_shard[static_cast<std::size_t>(i)] = constraints.satisfied_bindings(
        view, *shard.rule, at_ms, nullptr, fix, /*first_only=*/false);
  }

  std::vector<Violation> all;
  for (std::vector<Violation>& part : per_shard)
    all.insert(all.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace rolechain
