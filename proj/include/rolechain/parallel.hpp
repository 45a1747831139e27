#pragma once

#include <vector>

#include "rolechain/access.hpp"
#include "rolechain/constraints.hpp"

namespace rolechain {

/// Read-side kernels in two interchangeable builds: a plain serial loop kept
/// as the reference, and an OpenMP sweep over the same pure queries. Both
/// return identical, deterministically ordered results; the unit tests hold
/// them equal and the kernel benchmark tool compares their speed.

/// Decides a batch of access requests, one decision per request, in order.
std::vector<Decision> decide_batch_serial(const PolicyView& view,
                                          const std::vector<AccessRequest>& requests);
std::vector<Decision> decide_batch_parallel(const PolicyView& view,
                                            const std::vector<AccessRequest>& requests);

/// Every satisfied rule instantiation over the current state, sorted.
/// The parallel build shards the search by (rule, first-variable value).
std::vector<Violation> sod_scan_serial(const ConstraintSet& constraints,
                                       const PolicyView& view, SimMs at_ms);
std::vector<Violation> sod_scan_parallel(const ConstraintSet& constraints,
                                         const PolicyView& view, SimMs at_ms);

}  // namespace rolechain
