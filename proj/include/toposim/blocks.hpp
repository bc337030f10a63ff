#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "toposim/rational.hpp"

namespace toposim {

struct BlockRecord {
  std::uint64_t height = 0;
  double produce_time = 0;
  Rational gas_used_fraction;          // 1 = full
  std::vector<Rational> included_tx_prices;  // Gwei
};

// Synthetic block generator: a record every `interval` seconds with the
// configured fullness and price floor, overridable per height.
struct BlockStreamConfig {
  double start_time = 0;
  double interval = 15;
  std::uint64_t count = 0;
  Rational default_fullness{1};
  Rational default_floor{50};
  std::map<std::uint64_t, Rational> fullness_overrides;
  std::map<std::uint64_t, Rational> floor_overrides;
};

std::vector<BlockRecord> block_stream(const BlockStreamConfig& config);

// Measurement window [t1, t2] plus the mempool expiration tail e; Y0 is the
// measurement floor price.
struct NonInterferenceWindow {
  double t1 = 0;
  double t2 = 0;
  double expiry = 3 * 3600.0;
  Rational y0;
};

enum class VerifyStatus { kPass, kFail, kInconclusive };

struct VerifyResult {
  VerifyStatus status = VerifyStatus::kInconclusive;
  std::vector<std::uint64_t> non_full_heights;    // V1 violations
  std::vector<std::uint64_t> underpriced_heights; // V2 violations
  std::string note;

  bool passed() const { return status == VerifyStatus::kPass; }
};

// V1: every block in [t1, t2+e] is full. V2: every included price is
// strictly above Y0. Gaps or missing coverage are inconclusive, not failures.
VerifyResult verify_noninterference(const std::vector<BlockRecord>& blocks,
                                    const NonInterferenceWindow& window);

// JSON-lines serialization of a block stream (one record per line).
void write_block_stream(std::ostream& out, const std::vector<BlockRecord>& blocks);
std::vector<BlockRecord> read_block_stream(std::istream& in);

}  // namespace toposim
