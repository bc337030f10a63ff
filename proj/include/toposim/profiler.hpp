#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>

#include "toposim/mempool.hpp"
#include "toposim/types.hpp"

namespace toposim {

// Black-box view of a mempool under test: the prober may reset the pool,
// inject transactions and observe the stored set, nothing else. Accounts are
// owned by the prober, so it knows every base nonce it uses.
class MempoolTarget {
 public:
  virtual ~MempoolTarget() = default;
  virtual void reset() = 0;
  virtual void submit(const Transaction& tx) = 0;
  virtual bool holds(TxId id) const = 0;
  virtual std::size_t tx_count() const = 0;
  virtual AccountId new_account() = 0;
};

// Target backed by an in-process Mempool instance.
class LocalMempoolTarget : public MempoolTarget {
 public:
  explicit LocalMempoolTarget(PolicyProfile profile);
  void reset() override { pool_->clear(); }
  void submit(const Transaction& tx) override { pool_->submit(tx); }
  bool holds(TxId id) const override { return pool_->contains(id); }
  std::size_t tx_count() const override { return pool_->size(); }
  AccountId new_account() override { return accounts_.create(); }

  Mempool& pool() { return *pool_; }

 private:
  AccountTable accounts_;
  std::unique_ptr<Mempool> pool_;
};

struct ProfilingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProbeOptions {
  int search_iteration_cap = 32;
  std::int64_t bump_grid = 2000;       // replacement bump probed on a 1/2000 grid
  std::uint64_t capacity_cap = 65536;  // give up on the fill test beyond this
};

struct MeasuredPolicy {
  Rational replace_bump;
  std::optional<std::uint64_t> future_quota;  // nullopt = no quota observable
  std::uint64_t pending_floor = 0;
  std::uint64_t capacity = 0;
};

// Runs the replacement/eviction test batteries against a black-box mempool
// and reports the four policy parameters.
MeasuredPolicy profile_policy(MempoolTarget& target, const ProbeOptions& options = {});

}  // namespace toposim
