#include "toposim/types.hpp"

#include <algorithm>
#include <stdexcept>

namespace toposim {

void PolicyProfile::validate() const {
  if (capacity == 0) throw std::invalid_argument("capacity must be positive");
  if (future_quota && *future_quota == 0) throw std::invalid_argument("future quota must be >= 1");
  if (pending_floor >= capacity) throw std::invalid_argument("pending floor must be < capacity");
  if (replace_bump < Rational(0)) throw std::invalid_argument("replace bump must be >= 0");
}

namespace {

PolicyProfile make(const char* name, Rational r, std::optional<std::uint64_t> u,
                   std::uint64_t p, std::uint64_t l) {
  PolicyProfile prof;
  prof.client_name = name;
  prof.replace_bump = r;
  prof.future_quota = u;
  prof.pending_floor = p;
  prof.capacity = l;
  return prof;
}

}  // namespace

const PolicyProfile& geth_profile() {
  static const PolicyProfile p = make("geth", Rational(1, 10), 4096, 0, 5120);
  return p;
}

const PolicyProfile& parity_profile() {
  static const PolicyProfile p = make("parity", Rational(1, 8), 81, 2000, 8192);
  return p;
}

const PolicyProfile& nethermind_profile() {
  static const PolicyProfile p = make("nethermind", Rational(0), 17, 0, 2048);
  return p;
}

const PolicyProfile& besu_profile() {
  static const PolicyProfile p = make("besu", Rational(1, 10), std::nullopt, 0, 4096);
  return p;
}

const PolicyProfile& aleth_profile() {
  static const PolicyProfile p = make("aleth", Rational(0), 1, 0, 2048);
  return p;
}

const std::vector<PolicyProfile>& builtin_profiles() {
  static const std::vector<PolicyProfile> all = {
      geth_profile(), parity_profile(), nethermind_profile(), besu_profile(), aleth_profile()};
  return all;
}

std::optional<PolicyProfile> builtin_profile(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto& p : builtin_profiles()) {
    if (p.client_name == lower) return p;
  }
  return std::nullopt;
}

}  // namespace toposim
