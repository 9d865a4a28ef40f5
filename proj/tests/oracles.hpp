#pragma once

// Slow reference implementations shared by the unit and acceptance tests.

#include <algorithm>
#include <random>
#include <vector>

#include "autojacobin/autojacobin.hpp"

namespace ajb::oracle {

/// Hamming ranking by looping over individual bits, then a full stable sort.
inline std::vector<Index> hamming_topk(const BinaryCodes& base, const BinaryCodes& queries,
                                       Index q, Index count) {
  std::vector<std::pair<int, Index>> scored;
  for (Index i = 0; i < base.count(); ++i) {
    int dist = 0;
    for (Index j = 0; j < base.bits(); ++j) dist += base.bit(i, j) != queries.bit(q, j);
    scored.emplace_back(dist, i);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<Index> out;
  for (Index i = 0; i < count; ++i) out.push_back(scored[static_cast<std::size_t>(i)].second);
  return out;
}

/// Euclidean ranking by explicit per-coordinate sums and a full sort.
inline std::vector<Index> euclid_topk(const DataMatrix& base, const Vector& q, Index k) {
  std::vector<std::pair<double, Index>> scored;
  for (Index i = 0; i < base.cols(); ++i) {
    double s = 0.0;
    for (Index r = 0; r < base.rows(); ++r) s += (base(r, i) - q(r)) * (base(r, i) - q(r));
    scored.emplace_back(s, i);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<Index> out;
  for (Index i = 0; i < k; ++i) out.push_back(scored[static_cast<std::size_t>(i)].second);
  return out;
}

/// Uniform random codes; with `levels` > 0 each code is drawn from a small
/// pool so Hamming ties are frequent.
inline BinaryCodes random_codes(Index bits, Index n, std::mt19937_64& rng, Index levels = 0) {
  BinaryCodes c(bits, n);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::vector<bool>> pool;
  for (Index p = 0; p < levels; ++p) {
    std::vector<bool> code(static_cast<std::size_t>(bits));
    for (Index j = 0; j < bits; ++j) code[static_cast<std::size_t>(j)] = coin(rng);
    pool.push_back(code);
  }
  std::uniform_int_distribution<Index> pick(0, std::max<Index>(levels - 1, 0));
  for (Index i = 0; i < n; ++i) {
    const std::vector<bool>* src = levels > 0 ? &pool[static_cast<std::size_t>(pick(rng))] : nullptr;
    for (Index j = 0; j < bits; ++j) c.set_bit(i, j, src ? (*src)[static_cast<std::size_t>(j)] : coin(rng));
  }
  return c;
}

}  // namespace ajb::oracle
