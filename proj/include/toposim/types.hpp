#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "toposim/rational.hpp"

namespace toposim {

using AccountId = std::uint64_t;
using TxId = std::uint64_t;
using NodeId = std::uint32_t;
using Nonce = std::uint64_t;

constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

// Chain-level view of sender accounts: the nonce of the next valid pending
// transaction per account. Shared by every mempool in one simulation.
class AccountTable {
 public:
  AccountId create(Nonce base = 0) {
    base_.push_back(base);
    return base_.size() - 1;
  }
  Nonce base_nonce(AccountId a) const { return base_.at(a); }
  void advance(AccountId a, Nonce new_base) {
    if (new_base < base_.at(a)) throw std::logic_error("account nonce must not decrease");
    base_[a] = new_base;
  }
  std::size_t size() const { return base_.size(); }

 private:
  std::vector<Nonce> base_;
};

struct Transaction {
  TxId id = 0;
  AccountId sender = 0;
  Nonce nonce = 0;
  Rational gas_price;                  // Gwei, > 0
  std::optional<Rational> max_fee;     // Gwei, >= gas_price when present
  double submit_time = 0.0;            // simulated seconds

  // Price used in admission decisions. Fee-cap pools compare by max fee.
  const Rational& effective_price(bool fee_cap_mode) const {
    if (fee_cap_mode && max_fee) return *max_fee;
    return gas_price;
  }
};

// Mempool policy knobs of one client type.
//   replace_bump   minimal relative price bump accepted for a replacement
//   future_quota   max future txs per account admitted via eviction (nullopt = unbounded)
//   pending_floor  min pending txs that must remain for future-driven eviction
//   capacity       total tx slots
struct PolicyProfile {
  std::string client_name = "custom";
  Rational replace_bump{0};
  std::optional<std::uint64_t> future_quota = 1;
  std::uint64_t pending_floor = 0;
  std::uint64_t capacity = 1;
  bool forwards_futures = false;
  bool eip1559 = false;

  bool unbounded_quota() const { return !future_quota.has_value(); }
  void validate() const;
};

// Built-in client profiles.
const PolicyProfile& geth_profile();
const PolicyProfile& parity_profile();
const PolicyProfile& nethermind_profile();
const PolicyProfile& besu_profile();
const PolicyProfile& aleth_profile();
const std::vector<PolicyProfile>& builtin_profiles();
std::optional<PolicyProfile> builtin_profile(const std::string& name);

}  // namespace toposim
