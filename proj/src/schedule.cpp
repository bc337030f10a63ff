#include "toposim/schedule.hpp"

#include <stdexcept>

namespace toposim {

namespace {

std::uint64_t ceil_log2(std::uint64_t k) {
  std::uint64_t levels = 0;
  std::uint64_t reach = 1;
  while (reach < k) {
    reach *= 2;
    ++levels;
  }
  return levels;
}

}  // namespace

std::uint64_t schedule_iteration_count(std::uint32_t n, std::uint32_t k) {
  if (k < 1 || k > n) throw std::invalid_argument("group size must be in [1, n]");
  return n / k + ceil_log2(k);
}

std::vector<ScheduleIteration> make_schedule(std::uint32_t n, std::uint32_t k) {
  if (k < 1 || k > n) throw std::invalid_argument("group size must be in [1, n]");
  std::vector<ScheduleIteration> out;

  // round 1: full group i against every node after it
  std::uint32_t full_groups = n / k;
  for (std::uint32_t g = 0; g < full_groups; ++g) {
    ScheduleIteration it;
    it.round = 1;
    for (std::uint32_t v = g * k; v < (g + 1) * k; ++v) it.sources.push_back(v);
    for (std::uint32_t v = (g + 1) * k; v < n; ++v) it.sinks.push_back(v);
    for (std::uint32_t s : it.sources)
      for (std::uint32_t t : it.sinks) it.edges.push_back({s, t});
    out.push_back(std::move(it));
  }

  // round 2: recursive halving inside every group, one iteration per level
  std::vector<std::pair<std::uint32_t, std::uint32_t>> blocks;  // [begin, end)
  for (std::uint32_t begin = 0; begin < n; begin += k)
    blocks.push_back({begin, std::min(begin + k, n)});
  std::uint64_t levels = ceil_log2(k);
  for (std::uint64_t level = 0; level < levels; ++level) {
    ScheduleIteration it;
    it.round = 2;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> next;
    for (auto [begin, end] : blocks) {
      std::uint32_t size = end - begin;
      if (size < 2) {
        next.push_back({begin, end});
        continue;
      }
      std::uint32_t mid = begin + size / 2;
      for (std::uint32_t v = begin; v < mid; ++v) it.sources.push_back(v);
      for (std::uint32_t v = mid; v < end; ++v) it.sinks.push_back(v);
      for (std::uint32_t s = begin; s < mid; ++s)
        for (std::uint32_t t = mid; t < end; ++t) it.edges.push_back({s, t});
      next.push_back({begin, mid});
      next.push_back({mid, end});
    }
    blocks = std::move(next);
    out.push_back(std::move(it));
  }
  return out;
}

}  // namespace toposim
