#pragma once

#include <cstdint>

#include "toposim/mempool.hpp"
#include "toposim/types.hpp"

namespace toposim::test {

// Deterministic 64-bit mix, used by tests as a tiny seeded generator.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct TxFactory {
  TxId next_id = 1;
  double clock = 0.0;

  Transaction make(AccountId sender, Nonce nonce, Rational price) {
    Transaction tx;
    tx.id = next_id++;
    tx.sender = sender;
    tx.nonce = nonce;
    tx.gas_price = price;
    tx.submit_time = clock;
    clock += 1.0;
    return tx;
  }

  Transaction make_1559(AccountId sender, Nonce nonce, Rational price, Rational fee_cap) {
    Transaction tx = make(sender, nonce, price);
    tx.max_fee = fee_cap;
    return tx;
  }
};

}  // namespace toposim::test
