#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "toposim/types.hpp"

namespace toposim {

enum class TxClass { kPending, kFuture };

enum class ClassifyStatus { kPending, kFuture, kStale };

enum class AdmitStatus {
  kAdmitted,
  kAdmittedWithEviction,
  kReplaced,
  kDuplicate,
  kStale,
  kRejectedUnderpriced,
  kRejectedSenderQuota,
  kRejectedPendingFloor,
  kRejectedReplacement,
};

struct AdmitOutcome {
  AdmitStatus status = AdmitStatus::kRejectedUnderpriced;
  TxClass tx_class = TxClass::kFuture;     // classification of the stored tx
  std::optional<Transaction> evicted;      // victim (eviction) or old tx (replacement)

  bool stored() const {
    return status == AdmitStatus::kAdmitted || status == AdmitStatus::kAdmittedWithEviction ||
           status == AdmitStatus::kReplaced;
  }
  bool is_replacement() const { return status == AdmitStatus::kReplaced; }
};

struct PoolEntry {
  Transaction tx;
  TxClass tx_class;
};

// A single node's unconfirmed-transaction buffer. Admission, replacement and
// eviction follow the owner profile; classification is kept consistent with
// the shared account table after every mutation.
class Mempool {
 public:
  Mempool(PolicyProfile profile, const AccountTable* accounts);

  ClassifyStatus classify(const Transaction& tx) const;

  // Same-(sender, nonce) replacement. Pre: such an entry exists.
  AdmitOutcome try_replace(const Transaction& incoming);

  // Capacity/eviction path. Pre: no same-(sender, nonce) entry.
  AdmitOutcome try_admit(const Transaction& incoming);

  // Full pipeline: stale and duplicate checks, then replacement or admission.
  AdmitOutcome submit(const Transaction& incoming);

  std::vector<Transaction> drop_expired(double now, double expiry_seconds);

  // Drops entries made stale by an account-nonce advance and retags the rest.
  std::vector<Transaction> refresh_sender(AccountId sender);

  bool remove_tx(TxId id);

  std::size_t size() const { return id_index_.size(); }
  bool full() const { return size() >= profile_.capacity; }
  std::size_t pending_count() const { return pending_by_price_.size(); }
  std::size_t sender_count(AccountId sender) const;
  bool contains(TxId id) const { return id_index_.count(id) != 0; }
  const PoolEntry* find(AccountId sender, Nonce nonce) const;
  const PoolEntry* find_by_id(TxId id) const;
  std::optional<Rational> min_pending_price() const;
  std::size_t count_below(const Rational& price) const;  // entries priced strictly below
  std::vector<PoolEntry> snapshot() const;

  const PolicyProfile& profile() const { return profile_; }
  void clear();

 private:
  struct PriceKey {
    Rational price;
    double submit_time;
    TxId id;
    bool operator<(const PriceKey& o) const {
      if (price != o.price) return price < o.price;
      if (submit_time != o.submit_time) return submit_time < o.submit_time;
      return id < o.id;
    }
  };

  const Rational& eff(const Transaction& tx) const { return tx.effective_price(profile_.eip1559); }
  PriceKey key_of(const Transaction& tx) const { return {eff(tx), tx.submit_time, tx.id}; }

  void insert_entry(const Transaction& tx);
  Transaction erase_entry(AccountId sender, Nonce nonce);
  void reclassify_sender(AccountId sender);
  // Cheapest entry over both classes; nullopt when empty.
  std::optional<PriceKey> global_min() const;
  Transaction evict(const PriceKey& victim);

  PolicyProfile profile_;
  const AccountTable* accounts_;
  std::map<AccountId, std::map<Nonce, PoolEntry>> by_sender_;
  std::set<PriceKey> pending_by_price_;
  std::set<PriceKey> future_by_price_;
  std::unordered_map<TxId, std::pair<AccountId, Nonce>> id_index_;
};

}  // namespace toposim
