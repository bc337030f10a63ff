#include "toposim/mempool.hpp"

#include <algorithm>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "toposim/types.hpp"

using namespace toposim;
using toposim::test::TxFactory;
using toposim::test::mix64;

namespace {

PolicyProfile small_profile(std::int64_t r_num, std::int64_t r_den, std::uint64_t u,
                            std::uint64_t p, std::uint64_t l) {
  PolicyProfile prof;
  prof.client_name = "test";
  prof.replace_bump = Rational(r_num, r_den);
  prof.future_quota = u;
  prof.pending_floor = p;
  prof.capacity = l;
  return prof;
}

}  // namespace

TEST_CASE("classify follows nonce continuity") {
  AccountTable accounts;
  AccountId a = accounts.create(0);
  Mempool pool(geth_profile(), &accounts);
  TxFactory f;

  CHECK(pool.submit(f.make(a, 0, Rational(10))).status == AdmitStatus::kAdmitted);
  CHECK(pool.submit(f.make(a, 1, Rational(10))).status == AdmitStatus::kAdmitted);
  CHECK(pool.classify(f.make(a, 2, Rational(10))) == ClassifyStatus::kPending);

  AccountId b = accounts.create(0);
  CHECK(pool.classify(f.make(b, 5, Rational(10))) == ClassifyStatus::kFuture);

  AccountId c = accounts.create(3);
  CHECK(pool.classify(f.make(c, 2, Rational(10))) == ClassifyStatus::kStale);
  CHECK(pool.submit(f.make(c, 2, Rational(10))).status == AdmitStatus::kStale);
}

TEST_CASE("gap fill promotes later entries") {
  AccountTable accounts;
  AccountId a = accounts.create(0);
  Mempool pool(geth_profile(), &accounts);
  TxFactory f;

  pool.submit(f.make(a, 0, Rational(10)));
  auto out = pool.submit(f.make(a, 2, Rational(10)));
  CHECK(out.tx_class == TxClass::kFuture);
  CHECK(pool.pending_count() == 1);
  pool.submit(f.make(a, 1, Rational(10)));
  CHECK(pool.pending_count() == 3);
  for (const auto& e : pool.snapshot()) CHECK(e.tx_class == TxClass::kPending);
}

TEST_CASE("replacement threshold") {
  AccountTable accounts;
  TxFactory f;

  SUBCASE("geth: 110 over 100 replaces, 109 does not") {
    Mempool pool(geth_profile(), &accounts);
    AccountId a = accounts.create(0);
    pool.submit(f.make(a, 0, Rational(100)));
    Transaction low = f.make(a, 0, Rational(109));
    CHECK(pool.submit(low).status == AdmitStatus::kRejectedReplacement);
    Transaction ok = f.make(a, 0, Rational(110));
    auto out = pool.submit(ok);
    CHECK(out.status == AdmitStatus::kReplaced);
    CHECK(out.evicted->gas_price == Rational(100));
    CHECK(pool.find(a, 0)->tx.gas_price == Rational(110));
  }

  SUBCASE("parity boundary: 90 == 1.125 * 80 replaces") {
    Mempool pool(parity_profile(), &accounts);
    AccountId a = accounts.create(0);
    pool.submit(f.make(a, 0, Rational(80)));
    CHECK(pool.submit(f.make(a, 0, Rational(90))).status == AdmitStatus::kReplaced);
  }

  SUBCASE("equal price is a duplicate, not a replacement") {
    Mempool pool(aleth_profile(), &accounts);
    AccountId a = accounts.create(0);
    pool.submit(f.make(a, 0, Rational(50)));
    CHECK(pool.submit(f.make(a, 0, Rational(50))).status == AdmitStatus::kDuplicate);
  }
}

TEST_CASE("eviction by incoming future") {
  AccountTable accounts;
  TxFactory f;
  auto profile = small_profile(1, 10, 4096, 0, 8);
  Mempool pool(profile, &accounts);

  // full pool of pendings, cheapest at 5
  std::vector<AccountId> fillers;
  pool.submit(f.make(accounts.create(), 0, Rational(5)));
  for (int i = 1; i < 8; ++i) pool.submit(f.make(accounts.create(), 0, Rational(6 + i)));
  REQUIRE(pool.full());

  SUBCASE("future above the minimum evicts it") {
    AccountId s = accounts.create();
    auto out = pool.submit(f.make(s, 2, Rational(12)));
    CHECK(out.status == AdmitStatus::kAdmittedWithEviction);
    CHECK(out.evicted->gas_price == Rational(5));
    CHECK(pool.size() == 8);
  }

  SUBCASE("future at or below the minimum is underpriced") {
    AccountId s = accounts.create();
    CHECK(pool.submit(f.make(s, 2, Rational(5))).status == AdmitStatus::kRejectedUnderpriced);
    CHECK(pool.submit(f.make(s, 2, Rational(4))).status == AdmitStatus::kRejectedUnderpriced);
  }
}

TEST_CASE("sender quota rejects at any price") {
  AccountTable accounts;
  TxFactory f;
  Mempool pool(small_profile(0, 1, 1, 0, 4), &accounts);  // aleth-style U=1
  AccountId s = accounts.create();
  pool.submit(f.make(s, 2, Rational(100)));
  for (int i = 0; i < 3; ++i) pool.submit(f.make(accounts.create(), 0, Rational(10)));
  REQUIRE(pool.full());
  CHECK(pool.submit(f.make(s, 3, Rational(100000))).status == AdmitStatus::kRejectedSenderQuota);
}

TEST_CASE("pending floor blocks future-driven eviction") {
  AccountTable accounts;
  TxFactory f;
  Mempool pool(small_profile(1, 8, 81, 5, 8), &accounts);  // parity-style, scaled: P=5, L=8
  for (int i = 0; i < 4; ++i) pool.submit(f.make(accounts.create(), 0, Rational(10)));
  AccountId filler = accounts.create();
  for (int i = 0; i < 4; ++i) pool.submit(f.make(filler, 2 + i, Rational(12)));
  REQUIRE(pool.full());
  REQUIRE(pool.pending_count() == 4);  // 4 <= P
  CHECK(pool.submit(f.make(accounts.create(), 2, Rational(100))).status ==
        AdmitStatus::kRejectedPendingFloor);
}

TEST_CASE("pending incomer displaces the cheapest future first") {
  AccountTable accounts;
  TxFactory f;
  Mempool pool(small_profile(1, 10, 4096, 0, 4), &accounts);
  AccountId fut = accounts.create();
  pool.submit(f.make(fut, 2, Rational(50)));
  pool.submit(f.make(fut, 3, Rational(60)));
  pool.submit(f.make(accounts.create(), 0, Rational(5)));
  pool.submit(f.make(accounts.create(), 0, Rational(7)));
  REQUIRE(pool.full());

  // cheaper than every stored entry, still admitted: parked futures yield
  auto out = pool.submit(f.make(accounts.create(), 0, Rational(3)));
  CHECK(out.status == AdmitStatus::kAdmittedWithEviction);
  CHECK(out.evicted->gas_price == Rational(50));
  CHECK(out.tx_class == TxClass::kPending);

  // with no futures left, a pending incomer must outbid the cheapest pending
  pool.submit(f.make(accounts.create(), 0, Rational(9)));
  REQUIRE(pool.full());
  CHECK(pool.submit(f.make(accounts.create(), 0, Rational(3))).status ==
        AdmitStatus::kRejectedUnderpriced);
  auto out2 = pool.submit(f.make(accounts.create(), 0, Rational(6)));
  CHECK(out2.status == AdmitStatus::kAdmittedWithEviction);
  CHECK(out2.evicted->gas_price == Rational(3));
}

TEST_CASE("eviction tie-break prefers the oldest entry") {
  AccountTable accounts;
  TxFactory f;
  Mempool pool(small_profile(1, 10, 4096, 0, 3), &accounts);
  Transaction first = f.make(accounts.create(), 0, Rational(5));
  Transaction second = f.make(accounts.create(), 0, Rational(5));
  Transaction third = f.make(accounts.create(), 0, Rational(9));
  pool.submit(first);
  pool.submit(second);
  pool.submit(third);
  auto out = pool.submit(f.make(accounts.create(), 2, Rational(12)));
  REQUIRE(out.status == AdmitStatus::kAdmittedWithEviction);
  CHECK(out.evicted->id == first.id);
}

TEST_CASE("drop_expired uses strict age comparison") {
  AccountTable accounts;
  TxFactory f;
  Mempool pool(geth_profile(), &accounts);

  SUBCASE("empty pool") { CHECK(pool.drop_expired(100.0, 10800.0).empty()); }

  SUBCASE("boundary") {
    Transaction tx = f.make(accounts.create(), 0, Rational(10));
    tx.submit_time = 0.0;
    pool.submit(tx);
    CHECK(pool.drop_expired(10800.0, 10800.0).empty());
    auto dropped = pool.drop_expired(10801.0, 10800.0);
    REQUIRE(dropped.size() == 1);
    CHECK(dropped[0].id == tx.id);
    CHECK(pool.size() == 0);
  }
}

TEST_CASE("refresh after nonce advance drops stale entries") {
  AccountTable accounts;
  TxFactory f;
  Mempool pool(geth_profile(), &accounts);
  AccountId a = accounts.create(0);
  pool.submit(f.make(a, 0, Rational(10)));
  pool.submit(f.make(a, 1, Rational(10)));
  pool.submit(f.make(a, 2, Rational(10)));
  accounts.advance(a, 2);
  auto dropped = pool.refresh_sender(a);
  CHECK(dropped.size() == 2);
  REQUIRE(pool.size() == 1);
  CHECK(pool.snapshot()[0].tx.nonce == 2);
  CHECK(pool.snapshot()[0].tx_class == TxClass::kPending);
}

// Exercises random operation sequences and re-checks the declared invariants.
TEST_CASE("random walk keeps capacity, tags and victim ordering sound") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    AccountTable accounts;
    TxFactory f;
    Mempool pool(small_profile(1, 10, 5, 2, 24), &accounts);
    std::vector<AccountId> senders;
    for (int i = 0; i < 12; ++i) senders.push_back(accounts.create());

    std::uint64_t state = seed;
    auto rnd = [&](std::uint64_t mod) {
      state = mix64(state);
      return state % mod;
    };

    for (int step = 0; step < 4000; ++step) {
      AccountId s = senders[rnd(senders.size())];
      Nonce nonce = rnd(8);
      Rational price(1 + static_cast<std::int64_t>(rnd(40)));
      auto out = pool.submit(f.make(s, nonce, price));

      REQUIRE(pool.size() <= 24);
      if (out.status == AdmitStatus::kAdmittedWithEviction) {
        // victim never beats a surviving entry of its own class
        bool victim_was_pending = false;
        {
          Transaction probe = *out.evicted;
          // reconstruct class from the snapshot invariant instead: the victim
          // price must be <= all remaining entries of at least one class
          Rational v = probe.gas_price;
          bool below_pendings = true, below_futures = true;
          for (const auto& e : pool.snapshot()) {
            if (e.tx.id == 0) continue;
            if (e.tx_class == TxClass::kPending && e.tx.gas_price < v) below_pendings = false;
            if (e.tx_class == TxClass::kFuture && e.tx.gas_price < v) below_futures = false;
          }
          victim_was_pending = below_pendings;
          CHECK((below_pendings || below_futures));
        }
        (void)victim_was_pending;
      }

      // classification cache always matches a fresh classify
      if (step % 97 == 0) {
        std::size_t pendings = 0;
        for (const auto& e : pool.snapshot()) {
          Nonce base = accounts.base_nonce(e.tx.sender);
          REQUIRE(e.tx.nonce >= base);
          if (e.tx_class == TxClass::kPending) ++pendings;
        }
        CHECK(pendings == pool.pending_count());
        for (const auto& e : pool.snapshot()) {
          Mempool fresh(pool.profile(), &accounts);
          (void)fresh;
          // continuity: pending iff every lower nonce from base is present
          bool continuous = true;
          for (Nonce n = accounts.base_nonce(e.tx.sender); n < e.tx.nonce; ++n)
            if (!pool.find(e.tx.sender, n)) continuous = false;
          CHECK((e.tx_class == TxClass::kPending) == continuous);
        }
      }
    }
  }
}

TEST_CASE("replacement monotonicity") {
  // if a bump succeeds, any larger bump succeeds against the same state
  for (int bump = 0; bump <= 30; ++bump) {
    AccountTable accounts;
    TxFactory f;
    Mempool pool(small_profile(1, 8, 16, 0, 8), &accounts);
    AccountId a = accounts.create();
    pool.submit(f.make(a, 0, Rational(80)));
    auto out = pool.submit(f.make(a, 0, Rational(80 + bump)));
    bool ok = out.status == AdmitStatus::kReplaced;
    bool expect = Rational(80 + bump) >= Rational(9, 8) * Rational(80);
    CHECK(ok == expect);
  }
}

TEST_CASE("fee-cap mode matches legacy mode when max_fee equals gas_price") {
  for (std::uint64_t seed = 10; seed < 13; ++seed) {
    AccountTable accounts_a, accounts_b;
    TxFactory fa, fb;
    auto legacy = small_profile(1, 10, 4, 1, 12);
    auto fee_cap = legacy;
    fee_cap.eip1559 = true;
    Mempool pool_a(legacy, &accounts_a);
    Mempool pool_b(fee_cap, &accounts_b);
    for (int i = 0; i < 10; ++i) {
      accounts_a.create();
      accounts_b.create();
    }

    std::uint64_t state = seed;
    auto rnd = [&](std::uint64_t mod) {
      state = mix64(state);
      return state % mod;
    };
    for (int step = 0; step < 2000; ++step) {
      AccountId s = rnd(10);
      Nonce nonce = rnd(6);
      Rational price(1 + static_cast<std::int64_t>(rnd(30)));
      auto out_a = pool_a.submit(fa.make(s, nonce, price));
      auto out_b = pool_b.submit(fb.make_1559(s, nonce, price, price));
      CHECK(out_a.status == out_b.status);
      CHECK(pool_a.size() == pool_b.size());
      CHECK(pool_a.pending_count() == pool_b.pending_count());
    }
  }
}

TEST_CASE("fee-cap mode decides on max_fee when it differs") {
  AccountTable accounts;
  TxFactory f;
  auto prof = small_profile(1, 10, 16, 0, 8);
  prof.eip1559 = true;
  Mempool pool(prof, &accounts);
  AccountId a = accounts.create();
  pool.submit(f.make_1559(a, 0, Rational(100), Rational(100)));
  // gas price alone would be too low; the fee cap clears the bump
  CHECK(pool.submit(f.make_1559(a, 0, Rational(100), Rational(110))).status ==
        AdmitStatus::kReplaced);
}
