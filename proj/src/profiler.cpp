#include "toposim/profiler.hpp"

namespace toposim {

LocalMempoolTarget::LocalMempoolTarget(PolicyProfile profile)
    : pool_(std::make_unique<Mempool>(std::move(profile), &accounts_)) {}

namespace {

class Prober {
 public:
  Prober(MempoolTarget& target, const ProbeOptions& opt) : target_(target), opt_(opt) {}

  MeasuredPolicy run() {
    MeasuredPolicy out;
    out.capacity = measure_capacity();
    out.replace_bump = measure_replace_bump();
    out.pending_floor = measure_pending_floor(out.capacity);
    out.future_quota = measure_future_quota(out.capacity, out.pending_floor);
    return out;
  }

 private:
  Transaction make_tx(AccountId sender, Nonce nonce, Rational price) {
    Transaction tx;
    tx.id = next_id_++;
    tx.sender = sender;
    tx.nonce = nonce;
    tx.gas_price = price;
    tx.submit_time = static_cast<double>(next_id_);
    return tx;
  }

  // Fill with same-priced pending txs from distinct accounts; the first
  // rejection marks the capacity.
  std::uint64_t measure_capacity() {
    target_.reset();
    for (std::uint64_t i = 0; i < opt_.capacity_cap; ++i) {
      Transaction tx = make_tx(target_.new_account(), 0, Rational(10));
      target_.submit(tx);
      if (!target_.holds(tx.id)) return i;
    }
    throw ProfilingError("capacity fill test did not hit a rejection");
  }

  bool replacement_succeeds(std::int64_t bump_steps) {
    target_.reset();
    AccountId acct = target_.new_account();
    Transaction old_tx = make_tx(acct, 0, Rational(opt_.bump_grid));
    target_.submit(old_tx);
    Transaction probe = make_tx(acct, 0, Rational(opt_.bump_grid + bump_steps));
    target_.submit(probe);
    return target_.holds(probe.id);
  }

  // Minimal successful bump found by binary search on the probe grid. A bump
  // of one grid step succeeding means any price increase replaces, i.e. R=0.
  Rational measure_replace_bump() {
    if (!replacement_succeeds(opt_.bump_grid))
      throw ProfilingError("replacement never succeeded within the probe grid");
    std::int64_t lo = 1, hi = opt_.bump_grid;
    int iterations = 0;
    while (lo < hi) {
      if (++iterations > opt_.search_iteration_cap)
        throw ProfilingError("replacement bump search did not converge");
      std::int64_t mid = lo + (hi - lo) / 2;
      if (replacement_succeeds(mid))
        hi = mid;
      else
        lo = mid + 1;
    }
    if (lo == 1) return Rational(0);
    return Rational(lo, opt_.bump_grid);
  }

  // State: l pending fillers plus capacity-l futures, then a future probe
  // from a fresh account at top price. Succeeds iff l exceeds the floor.
  bool eviction_succeeds_with_pendings(std::uint64_t l, std::uint64_t capacity) {
    target_.reset();
    for (std::uint64_t i = 0; i < l; ++i)
      target_.submit(make_tx(target_.new_account(), 0, Rational(10)));
    AccountId future_filler = target_.new_account();
    for (std::uint64_t i = 0; i < capacity - l; ++i)
      target_.submit(make_tx(future_filler, 2 + i, Rational(12)));
    Transaction probe = make_tx(target_.new_account(), 2, Rational(10000));
    target_.submit(probe);
    return target_.holds(probe.id);
  }

  std::uint64_t measure_pending_floor(std::uint64_t capacity) {
    std::uint64_t lo = 0, hi = capacity;  // probe(capacity) must succeed: floor < capacity
    if (!eviction_succeeds_with_pendings(hi, capacity))
      throw ProfilingError("eviction never succeeded in the pending-floor battery");
    int iterations = 0;
    while (lo < hi) {
      if (++iterations > opt_.search_iteration_cap)
        throw ProfilingError("pending floor search did not converge");
      std::uint64_t mid = lo + (hi - lo) / 2;
      if (eviction_succeeds_with_pendings(mid, capacity))
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo - 1;
  }

  // State: full pool of pending fillers, u prior futures from the probe
  // account, then one more future from it at top price. Succeeds iff the
  // account stays under the quota.
  bool eviction_succeeds_with_quota_use(std::uint64_t u, std::uint64_t capacity) {
    target_.reset();
    for (std::uint64_t i = 0; i < capacity; ++i)
      target_.submit(make_tx(target_.new_account(), 0, Rational(10)));
    AccountId acct = target_.new_account();
    for (std::uint64_t i = 0; i < u; ++i)
      target_.submit(make_tx(acct, 2 + i, Rational(20 + static_cast<std::int64_t>(i))));
    Transaction probe = make_tx(acct, 2 + u, Rational(10000));
    target_.submit(probe);
    return target_.holds(probe.id);
  }

  std::optional<std::uint64_t> measure_future_quota(std::uint64_t capacity,
                                                    std::uint64_t pending_floor) {
    // Beyond capacity-floor-1 prior futures the pending floor blocks the
    // probe regardless of the quota, so the quota is unobservable there.
    std::uint64_t probe_max = capacity - pending_floor - 1;
    if (eviction_succeeds_with_quota_use(probe_max, capacity)) return std::nullopt;
    std::uint64_t lo = 0, hi = probe_max;  // success at lo, failure at hi
    if (!eviction_succeeds_with_quota_use(0, capacity))
      throw ProfilingError("eviction never succeeded in the quota battery");
    int iterations = 0;
    while (lo + 1 < hi) {
      if (++iterations > opt_.search_iteration_cap)
        throw ProfilingError("future quota search did not converge");
      std::uint64_t mid = lo + (hi - lo) / 2;
      if (eviction_succeeds_with_quota_use(mid, capacity))
        lo = mid;
      else
        hi = mid;
    }
    return lo + 1;
  }

  MempoolTarget& target_;
  const ProbeOptions& opt_;
  TxId next_id_ = 1;
};

}  // namespace

MeasuredPolicy profile_policy(MempoolTarget& target, const ProbeOptions& options) {
  Prober prober(target, options);
  return prober.run();
}

}  // namespace toposim
