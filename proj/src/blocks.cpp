#include "toposim/blocks.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace toposim {

std::vector<BlockRecord> block_stream(const BlockStreamConfig& config) {
  if (config.interval <= 0) throw std::invalid_argument("block interval must be positive");
  std::vector<BlockRecord> out;
  out.reserve(config.count);
  for (std::uint64_t i = 0; i < config.count; ++i) {
    BlockRecord b;
    b.height = i + 1;
    b.produce_time = config.start_time + config.interval * static_cast<double>(i + 1);
    auto fit = config.fullness_overrides.find(b.height);
    b.gas_used_fraction = fit == config.fullness_overrides.end() ? config.default_fullness
                                                                 : fit->second;
    auto pit = config.floor_overrides.find(b.height);
    Rational floor = pit == config.floor_overrides.end() ? config.default_floor : pit->second;
    b.included_tx_prices = {floor, floor * Rational(2), floor * Rational(5)};
    out.push_back(std::move(b));
  }
  return out;
}

VerifyResult verify_noninterference(const std::vector<BlockRecord>& blocks,
                                    const NonInterferenceWindow& window) {
  VerifyResult result;
  if (window.t1 >= window.t2 || window.expiry <= 0) {
    result.note = "bad window";
    return result;
  }
  double window_end = window.t2 + window.expiry;

  if (blocks.empty()) {
    result.note = "empty stream";
    return result;
  }
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    if (blocks[i].height != blocks[i - 1].height + 1 ||
        blocks[i].produce_time <= blocks[i - 1].produce_time) {
      result.note = "stream gap at height " + std::to_string(blocks[i].height);
      return result;
    }
  }
  if (blocks.front().produce_time > window.t1 || blocks.back().produce_time < window_end) {
    result.note = "stream does not cover the window";
    return result;
  }

  for (const auto& b : blocks) {
    if (b.produce_time < window.t1 || b.produce_time > window_end) continue;
    if (b.gas_used_fraction != Rational(1)) result.non_full_heights.push_back(b.height);
    for (const auto& price : b.included_tx_prices) {
      if (!(price > window.y0)) {
        result.underpriced_heights.push_back(b.height);
        break;
      }
    }
  }
  result.status = result.non_full_heights.empty() && result.underpriced_heights.empty()
                      ? VerifyStatus::kPass
                      : VerifyStatus::kFail;
  return result;
}

void write_block_stream(std::ostream& out, const std::vector<BlockRecord>& blocks) {
  for (const auto& b : blocks) {
    nlohmann::json j;
    j["height"] = b.height;
    j["time"] = b.produce_time;
    j["gas_used_fraction"] = b.gas_used_fraction.to_string();
    nlohmann::json prices = nlohmann::json::array();
    for (const auto& p : b.included_tx_prices) prices.push_back(p.to_string());
    j["prices"] = prices;
    out << j.dump() << "\n";
  }
}

std::vector<BlockRecord> read_block_stream(std::istream& in) {
  std::vector<BlockRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw std::runtime_error("bad block record on line " + std::to_string(line_no));
    BlockRecord b;
    b.height = j.at("height").get<std::uint64_t>();
    b.produce_time = j.at("time").get<double>();
    auto frac = Rational::parse(j.at("gas_used_fraction").get<std::string>());
    if (!frac) throw std::runtime_error("bad fullness on line " + std::to_string(line_no));
    b.gas_used_fraction = *frac;
    for (const auto& p : j.at("prices")) {
      auto price = Rational::parse(p.get<std::string>());
      if (!price) throw std::runtime_error("bad price on line " + std::to_string(line_no));
      b.included_tx_prices.push_back(*price);
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace toposim
