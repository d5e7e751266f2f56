#pragma once

// Shared test helpers: a seeded generator and small brute-force oracles
// that do not reuse library code paths.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "ncnet/algebra.hpp"

namespace testing_support {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  std::vector<ncnet::Symbol> symbols(std::size_t count, std::int64_t q) {
    std::vector<ncnet::Symbol> v(count);
    for (auto& s : v) s = static_cast<ncnet::Symbol>(range(0, q - 1));
    return v;
  }
  std::vector<ncnet::Symbol> permutation(std::size_t n) {
    std::vector<ncnet::Symbol> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<ncnet::Symbol>(i);
    std::shuffle(p.begin(), p.end(), rng_);
    return p;
  }

 private:
  std::mt19937_64 rng_;
};

inline std::int64_t slow_gcd(std::int64_t a, std::int64_t b) {
  std::int64_t g = 1;
  for (std::int64_t d = 1; d <= std::max(a, b); ++d)
    if (a % d == 0 && b % d == 0) g = d;
  return g;
}

inline bool slow_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d < n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Number of integer partitions of n.
inline std::int64_t partitions(int n) {
  std::vector<std::int64_t> p(n + 1, 0);
  p[0] = 1;
  for (int part = 1; part <= n; ++part)
    for (int s = part; s <= n; ++s) p[s] += p[s - part];
  return p[n];
}

}  // namespace testing_support

#include "ncnet/network.hpp"

namespace testing_support {

// Adds one to the first decoder coefficient.
inline void bump_decoder(ncnet::Code& code) {
  auto& lf = std::get<ncnet::LinearForm>(code.decoders.begin()->second.body);
  auto& b = lf.blocks.front();
  b.set(0, 0, b(0, 0) + 1);
}

// Swaps two images in the first non-identity input relabelling.
inline bool corrupt_permutation(ncnet::Code& code) {
  for (auto& [id, fn] : code.edge_functions) {
    auto* pf = std::get_if<ncnet::PermutedForm>(&fn.body);
    if (!pf) continue;
    for (auto& p : pf->input_perms) {
      if (!p || p->is_identity()) continue;
      auto map = p->mapping();
      std::swap(map[0], map[1]);
      p = ncnet::Permutation(map);
      return true;
    }
  }
  return false;
}

}  // namespace testing_support
