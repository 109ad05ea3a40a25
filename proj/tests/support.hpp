#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "repfair/core.hpp"

namespace testsupport {

using repfair::Allocation;
using repfair::Instance;
using repfair::Rational;
using repfair::Sequence;

inline Instance matrix(std::vector<std::vector<Rational>> rows) {
  return Instance::from_matrix(std::move(rows));
}

inline std::int64_t uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

enum class Signs { Mixed, Goods, Chores };

/// Integer utilities in [lo, hi], sign-restricted on request (zero excluded for goods/chores).
inline Instance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t m, std::int64_t lo,
                                std::int64_t hi, Signs signs = Signs::Mixed) {
  std::vector<std::vector<Rational>> rows(n);
  for (auto& row : rows) {
    for (std::size_t o = 0; o < m; ++o) {
      std::int64_t v = 0;
      switch (signs) {
        case Signs::Mixed: v = uniform(rng, lo, hi); break;
        case Signs::Goods: v = uniform(rng, 1, hi); break;
        case Signs::Chores: v = -uniform(rng, 1, -lo); break;
      }
      row.emplace_back(v);
    }
  }
  return Instance::from_matrix(std::move(rows));
}

/// Random rational in [lo, hi] with denominator up to max_den.
inline Rational random_rational(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi, std::int64_t max_den) {
  const std::int64_t den = uniform(rng, 1, max_den);
  return Rational(uniform(rng, lo * den, hi * den), den);
}

inline Allocation random_allocation(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::vector<std::size_t> owners(m);
  for (auto& o : owners) o = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(n) - 1));
  return Allocation(n, std::move(owners));
}

inline Sequence random_sequence(std::mt19937_64& rng, std::size_t n, std::size_t m, std::size_t k) {
  Sequence seq;
  for (std::size_t r = 0; r < k; ++r) seq.push_back(random_allocation(rng, n, m));
  return seq;
}

/// All n^m allocations in owner-vector lexicographic order.
inline std::vector<Allocation> all_allocations(std::size_t n, std::size_t m) {
  std::vector<Allocation> out;
  std::vector<std::size_t> owners(m, 0);
  for (;;) {
    out.emplace_back(n, owners);
    std::size_t pos = m;
    while (pos > 0 && owners[pos - 1] + 1 == n) owners[--pos] = 0;
    if (pos == 0) break;
    ++owners[pos - 1];
  }
  return out;
}

}  // namespace testsupport
