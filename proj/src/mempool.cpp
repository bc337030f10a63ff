#include "toposim/mempool.hpp"

#include <cassert>
#include <stdexcept>

namespace toposim {

Mempool::Mempool(PolicyProfile profile, const AccountTable* accounts)
    : profile_(std::move(profile)), accounts_(accounts) {
  profile_.validate();
  if (!accounts_) throw std::invalid_argument("mempool needs an account table");
}

ClassifyStatus Mempool::classify(const Transaction& tx) const {
  Nonce base = accounts_->base_nonce(tx.sender);
  if (tx.nonce < base) return ClassifyStatus::kStale;
  // Nonce of the first gap at or above base among the sender's entries.
  Nonce expected = base;
  auto it = by_sender_.find(tx.sender);
  if (it != by_sender_.end()) {
    for (const auto& [nonce, entry] : it->second) {
      (void)entry;
      if (nonce != expected) break;
      ++expected;
    }
  }
  return tx.nonce <= expected ? ClassifyStatus::kPending : ClassifyStatus::kFuture;
}

AdmitOutcome Mempool::try_replace(const Transaction& incoming) {
  auto sit = by_sender_.find(incoming.sender);
  if (sit == by_sender_.end()) throw std::logic_error("try_replace without existing entry");
  auto eit = sit->second.find(incoming.nonce);
  if (eit == sit->second.end()) throw std::logic_error("try_replace without existing entry");

  const Transaction& old = eit->second.tx;
  Rational threshold = (Rational(1) + profile_.replace_bump) * eff(old);
  AdmitOutcome out;
  if (eff(incoming) >= threshold) {
    Transaction replaced = erase_entry(incoming.sender, incoming.nonce);
    insert_entry(incoming);
    out.status = AdmitStatus::kReplaced;
    out.tx_class = find(incoming.sender, incoming.nonce)->tx_class;
    out.evicted = replaced;
  } else {
    out.status = AdmitStatus::kRejectedReplacement;
  }
  return out;
}

AdmitOutcome Mempool::try_admit(const Transaction& incoming) {
  ClassifyStatus cls = classify(incoming);
  if (cls == ClassifyStatus::kStale) return {AdmitStatus::kStale, TxClass::kFuture, {}};

  AdmitOutcome out;
  if (!full()) {
    insert_entry(incoming);
    out.status = AdmitStatus::kAdmitted;
    out.tx_class = find(incoming.sender, incoming.nonce)->tx_class;
    return out;
  }

  if (cls == ClassifyStatus::kFuture) {
    // Future-driven eviction: lowest-priced entry goes, subject to the
    // sender quota, the pending floor and a strict price win.
    if (profile_.future_quota && sender_count(incoming.sender) >= *profile_.future_quota)
      return {AdmitStatus::kRejectedSenderQuota, TxClass::kFuture, {}};
    if (pending_count() <= profile_.pending_floor)
      return {AdmitStatus::kRejectedPendingFloor, TxClass::kFuture, {}};
    auto victim = global_min();
    assert(victim.has_value());
    if (!(eff(incoming) > victim->price))
      return {AdmitStatus::kRejectedUnderpriced, TxClass::kFuture, {}};
    out.evicted = evict(*victim);
  } else {
    // An executable transaction entering a full pool displaces the cheapest
    // parked future; with no futures left it must outbid the cheapest pending.
    if (!future_by_price_.empty()) {
      out.evicted = evict(*future_by_price_.begin());
    } else {
      PriceKey victim = *pending_by_price_.begin();
      if (!(eff(incoming) > victim.price))
        return {AdmitStatus::kRejectedUnderpriced, TxClass::kPending, {}};
      out.evicted = evict(victim);
    }
  }

  insert_entry(incoming);
  out.status = AdmitStatus::kAdmittedWithEviction;
  out.tx_class = find(incoming.sender, incoming.nonce)->tx_class;
  return out;
}

AdmitOutcome Mempool::submit(const Transaction& incoming) {
  if (classify(incoming) == ClassifyStatus::kStale)
    return {AdmitStatus::kStale, TxClass::kFuture, {}};
  const PoolEntry* existing = find(incoming.sender, incoming.nonce);
  if (existing) {
    if (eff(existing->tx) == eff(incoming))
      return {AdmitStatus::kDuplicate, existing->tx_class, {}};
    return try_replace(incoming);
  }
  return try_admit(incoming);
}

std::vector<Transaction> Mempool::drop_expired(double now, double expiry_seconds) {
  if (expiry_seconds <= 0) throw std::invalid_argument("expiry must be positive");
  std::vector<Transaction> dropped;
  std::vector<std::pair<AccountId, Nonce>> doomed;
  for (const auto& [sender, entries] : by_sender_) {
    for (const auto& [nonce, entry] : entries) {
      if (now - entry.tx.submit_time > expiry_seconds) doomed.emplace_back(sender, nonce);
    }
  }
  for (const auto& [sender, nonce] : doomed) dropped.push_back(erase_entry(sender, nonce));
  return dropped;
}

std::vector<Transaction> Mempool::refresh_sender(AccountId sender) {
  std::vector<Transaction> dropped;
  auto sit = by_sender_.find(sender);
  if (sit == by_sender_.end()) return dropped;
  Nonce base = accounts_->base_nonce(sender);
  std::vector<Nonce> doomed;
  for (const auto& [nonce, entry] : sit->second) {
    (void)entry;
    if (nonce < base) doomed.push_back(nonce);
  }
  for (Nonce n : doomed) dropped.push_back(erase_entry(sender, n));
  reclassify_sender(sender);
  return dropped;
}

bool Mempool::remove_tx(TxId id) {
  auto it = id_index_.find(id);
  if (it == id_index_.end()) return false;
  erase_entry(it->second.first, it->second.second);
  return true;
}

std::size_t Mempool::sender_count(AccountId sender) const {
  auto it = by_sender_.find(sender);
  return it == by_sender_.end() ? 0 : it->second.size();
}

const PoolEntry* Mempool::find(AccountId sender, Nonce nonce) const {
  auto sit = by_sender_.find(sender);
  if (sit == by_sender_.end()) return nullptr;
  auto eit = sit->second.find(nonce);
  return eit == sit->second.end() ? nullptr : &eit->second;
}

const PoolEntry* Mempool::find_by_id(TxId id) const {
  auto it = id_index_.find(id);
  if (it == id_index_.end()) return nullptr;
  return find(it->second.first, it->second.second);
}

std::optional<Rational> Mempool::min_pending_price() const {
  if (pending_by_price_.empty()) return std::nullopt;
  return pending_by_price_.begin()->price;
}

std::size_t Mempool::count_below(const Rational& price) const {
  std::size_t count = 0;
  for (const auto& key : pending_by_price_) {
    if (!(key.price < price)) break;
    ++count;
  }
  for (const auto& key : future_by_price_) {
    if (!(key.price < price)) break;
    ++count;
  }
  return count;
}

std::vector<PoolEntry> Mempool::snapshot() const {
  std::vector<PoolEntry> out;
  out.reserve(size());
  for (const auto& [sender, entries] : by_sender_) {
    (void)sender;
    for (const auto& [nonce, entry] : entries) {
      (void)nonce;
      out.push_back(entry);
    }
  }
  return out;
}

void Mempool::clear() {
  by_sender_.clear();
  pending_by_price_.clear();
  future_by_price_.clear();
  id_index_.clear();
}

void Mempool::insert_entry(const Transaction& tx) {
  auto& slot = by_sender_[tx.sender][tx.nonce];
  slot.tx = tx;
  slot.tx_class = TxClass::kFuture;  // fixed up by reclassify below
  future_by_price_.insert(key_of(tx));
  id_index_[tx.id] = {tx.sender, tx.nonce};
  reclassify_sender(tx.sender);
}

Transaction Mempool::erase_entry(AccountId sender, Nonce nonce) {
  auto sit = by_sender_.find(sender);
  assert(sit != by_sender_.end());
  auto eit = sit->second.find(nonce);
  assert(eit != sit->second.end());
  Transaction out = eit->second.tx;
  if (eit->second.tx_class == TxClass::kPending)
    pending_by_price_.erase(key_of(out));
  else
    future_by_price_.erase(key_of(out));
  id_index_.erase(out.id);
  sit->second.erase(eit);
  if (sit->second.empty())
    by_sender_.erase(sit);
  else
    reclassify_sender(sender);
  return out;
}

void Mempool::reclassify_sender(AccountId sender) {
  auto sit = by_sender_.find(sender);
  if (sit == by_sender_.end()) return;
  Nonce expected = accounts_->base_nonce(sender);
  bool in_prefix = true;
  for (auto& [nonce, entry] : sit->second) {
    if (in_prefix && nonce != expected) in_prefix = false;
    TxClass cls = in_prefix ? TxClass::kPending : TxClass::kFuture;
    if (in_prefix) ++expected;
    if (cls != entry.tx_class) {
      if (entry.tx_class == TxClass::kPending) {
        pending_by_price_.erase(key_of(entry.tx));
        future_by_price_.insert(key_of(entry.tx));
      } else {
        future_by_price_.erase(key_of(entry.tx));
        pending_by_price_.insert(key_of(entry.tx));
      }
      entry.tx_class = cls;
    } else if (!in_prefix) {
      // Entries past the pending prefix that already carry the future tag
      // cannot be followed by mistagged ones; stop early.
      break;
    }
  }
}

std::optional<Mempool::PriceKey> Mempool::global_min() const {
  if (pending_by_price_.empty() && future_by_price_.empty()) return std::nullopt;
  if (pending_by_price_.empty()) return *future_by_price_.begin();
  if (future_by_price_.empty()) return *pending_by_price_.begin();
  return std::min(*pending_by_price_.begin(), *future_by_price_.begin());
}

Transaction Mempool::evict(const PriceKey& victim) {
  auto it = id_index_.find(victim.id);
  assert(it != id_index_.end());
  return erase_entry(it->second.first, it->second.second);
}

}  // namespace toposim
