#pragma once

#include <cstdint>
#include <vector>

namespace toposim {

// One parallel-measurement iteration over node-list indices: test every
// listed (source, sink) pair in a single pass.
struct ScheduleIteration {
  int round = 1;
  std::vector<std::uint32_t> sources;
  std::vector<std::uint32_t> sinks;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // (source, sink)
};

// Two-round decomposition for n nodes with group size k. Round 1 measures
// each leading group against everything after it; round 2 halves the groups
// recursively until singleton blocks remain. Every unordered pair appears in
// exactly one iteration. The count is floor(n/k) + ceil(log2 k); when k
// divides n the last round-1 iteration has an empty sink set.
std::vector<ScheduleIteration> make_schedule(std::uint32_t n, std::uint32_t k);

std::uint64_t schedule_iteration_count(std::uint32_t n, std::uint32_t k);

}  // namespace toposim
