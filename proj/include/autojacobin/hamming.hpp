#pragma once

// Binary encoding, Hamming-space retrieval and recall metrics.
//
// Codes are packed LSB-first: bit j of a point lives in byte j/8 at bit
// position j%8, and a set bit means +1. Unused trailing bits are zero.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "autojacobin/binary_io.hpp"
#include "autojacobin/errors.hpp"
#include "autojacobin/matrix_io.hpp"
#include "autojacobin/network.hpp"
#include "autojacobin/parallel.hpp"

namespace ajb {

class BinaryCodes {
 public:
  BinaryCodes() = default;
  BinaryCodes(Index bits, Index count)
      : bits_(bits), count_(count), stride_((bits + 7) / 8),
        packed_(static_cast<std::size_t>(count * ((bits + 7) / 8)), 0) {
    if (bits < 1) throw DimensionError("BinaryCodes: bits must be positive");
  }

  Index bits() const { return bits_; }
  Index count() const { return count_; }
  Index stride() const { return stride_; }
  const std::vector<std::uint8_t>& packed() const { return packed_; }

  const std::uint8_t* code(Index i) const { return packed_.data() + i * stride_; }
  std::span<const std::uint8_t> code_span(Index i) const {
    return {code(i), static_cast<std::size_t>(stride_)};
  }

  bool bit(Index i, Index j) const { return (code(i)[j / 8] >> (j % 8)) & 1u; }
  void set_bit(Index i, Index j, bool on) {
    std::uint8_t& byte = packed_[static_cast<std::size_t>(i * stride_ + j / 8)];
    const auto mask = static_cast<std::uint8_t>(1u << (j % 8));
    byte = on ? static_cast<std::uint8_t>(byte | mask) : static_cast<std::uint8_t>(byte & ~mask);
  }

  /// d x N matrix of +1/-1 entries.
  Matrix unpack() const {
    Matrix out(bits_, count_);
    for (Index i = 0; i < count_; ++i)
      for (Index j = 0; j < bits_; ++j) out(j, i) = bit(i, j) ? 1.0 : -1.0;
    return out;
  }

  static BinaryCodes from_packed(Index bits, Index count, std::vector<std::uint8_t> packed) {
    BinaryCodes c(bits, count);
    if (packed.size() != c.packed_.size()) throw FormatError("codes: packed length mismatch");
    c.packed_ = std::move(packed);
    const Index tail = bits % 8;
    if (tail != 0)
      for (Index i = 0; i < count; ++i)
        if (c.code(i)[c.stride_ - 1] >> tail)
          throw FormatError("codes: unused trailing bits must be zero");
    return c;
  }

  friend bool operator==(const BinaryCodes&, const BinaryCodes&) = default;

 private:
  Index bits_ = 0;
  Index count_ = 0;
  Index stride_ = 0;
  std::vector<std::uint8_t> packed_;
};

/// Bit j of point i is set iff (W1 x_i)_j >= 0, or (W1 x_i + b1)_j >= 0 with
/// use_bias. sign(0) counts as +1. X must already be normalized.
inline BinaryCodes encode(const NetworkParams& p, const DataMatrix& x, bool use_bias = false) {
  if (x.cols() > 0 && x.rows() != p.dims())
    throw DimensionError("encode: data has " + std::to_string(x.rows()) + " dims, model expects " +
                         std::to_string(p.dims()));
  BinaryCodes codes(p.bits(), x.cols());
  const ChunkPlan plan{static_cast<std::size_t>(x.cols()), 1024};
  parallel_chunks(plan.count(), [&](std::size_t c) {
    const auto b = static_cast<Index>(plan.begin(c));
    const auto e = static_cast<Index>(plan.end(c));
    Matrix proj = p.w1 * x.middleCols(b, e - b);
    if (use_bias) proj.colwise() += p.b1;
    for (Index i = b; i < e; ++i)
      for (Index j = 0; j < p.bits(); ++j) codes.set_bit(i, j, proj(j, i - b) >= 0.0);
  });
  return codes;
}

/// Popcount of a XOR b over `bytes` bytes, eight bytes per step.
inline int hamming_distance(const std::uint8_t* a, const std::uint8_t* b, std::size_t bytes) {
  int dist = 0;
  std::size_t i = 0;
  for (; i + 8 <= bytes; i += 8) {
    std::uint64_t wa, wb;
    std::memcpy(&wa, a + i, 8);
    std::memcpy(&wb, b + i, 8);
    dist += std::popcount(wa ^ wb);
  }
  for (; i < bytes; ++i) dist += std::popcount(static_cast<unsigned>(a[i] ^ b[i]));
  return dist;
}

inline std::vector<int> hamming_distances(const BinaryCodes& base, const std::uint8_t* q) {
  std::vector<int> dist(static_cast<std::size_t>(base.count()));
  const auto stride = static_cast<std::size_t>(base.stride());
  for (Index i = 0; i < base.count(); ++i)
    dist[static_cast<std::size_t>(i)] = hamming_distance(base.code(i), q, stride);
  return dist;
}

/// All base indices ordered by Hamming distance to q, ties by ascending index.
/// Counting sort over the d+1 possible distances.
inline std::vector<Index> hamming_order(const BinaryCodes& base, const std::uint8_t* q) {
  const auto dist = hamming_distances(base, q);
  std::vector<Index> start(static_cast<std::size_t>(base.bits()) + 2, 0);
  for (int v : dist) ++start[static_cast<std::size_t>(v) + 1];
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<Index> order(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i)
    order[static_cast<std::size_t>(start[static_cast<std::size_t>(dist[i])]++)] =
        static_cast<Index>(i);
  return order;
}

/// The `count` base codes closest to q in Hamming distance, ties by index.
inline std::vector<Index> hamming_topk(const BinaryCodes& base, std::span<const std::uint8_t> q,
                                       Index count) {
  if (static_cast<Index>(q.size()) != base.stride())
    throw DimensionError("hamming_topk: query code has wrong length");
  if (count < 1 || count > base.count())
    throw DimensionError("hamming_topk: i=" + std::to_string(count) + " not in [1, N=" +
                         std::to_string(base.count()) + "]");
  auto order = hamming_order(base, q.data());
  order.resize(static_cast<std::size_t>(count));
  return order;
}

namespace detail {

inline std::vector<Index> nearest_by_distance(std::vector<std::pair<double, Index>> scored,
                                              Index k) {
  std::partial_sort(scored.begin(), scored.begin() + k, scored.end());
  std::vector<Index> out(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = scored[static_cast<std::size_t>(i)].second;
  return out;
}

}  // namespace detail

/// Exact k nearest base points to q by Euclidean distance, ties by index.
inline std::vector<Index> euclid_topk(const DataMatrix& base, const Vector& q, Index k) {
  if (q.size() != base.rows()) throw DimensionError("euclid_topk: query has wrong dimension");
  if (k < 1 || k > base.cols()) throw DimensionError("euclid_topk: k out of range");
  const Eigen::RowVectorXd dist = (base.colwise() - q).colwise().squaredNorm();
  std::vector<std::pair<double, Index>> scored(static_cast<std::size_t>(base.cols()));
  for (Index i = 0; i < base.cols(); ++i) scored[static_cast<std::size_t>(i)] = {dist(i), i};
  return detail::nearest_by_distance(std::move(scored), k);
}

/// The k candidates nearest to q in Euclidean distance, nearest first.
inline std::vector<Index> rerank(const DataMatrix& base, std::span<const Index> candidates,
                                 const Vector& q, Index k) {
  if (k < 0 || k > static_cast<Index>(candidates.size()))
    throw DimensionError("rerank: k exceeds the candidate count");
  if (q.size() != base.rows()) throw DimensionError("rerank: query has wrong dimension");
  std::vector<std::pair<double, Index>> scored;
  scored.reserve(candidates.size());
  for (Index c : candidates) {
    if (c < 0 || c >= base.cols()) throw DimensionError("rerank: candidate index out of range");
    scored.emplace_back((base.col(c) - q).squaredNorm(), c);
  }
  if (k == 0) return {};
  return detail::nearest_by_distance(std::move(scored), k);
}

/// Per query, the k true Euclidean nearest base indices.
struct GroundTruth {
  Index k = 0;
  std::vector<std::vector<Index>> rows;

  Index queries() const { return static_cast<Index>(rows.size()); }

  /// Same ground truth restricted to the first k' <= k neighbours.
  GroundTruth prefix(Index kk) const {
    if (kk < 1 || kk > k) throw DimensionError("GroundTruth::prefix: k out of range");
    GroundTruth g;
    g.k = kk;
    for (const auto& r : rows) g.rows.emplace_back(r.begin(), r.begin() + kk);
    return g;
  }
};

inline GroundTruth compute_ground_truth(const DataMatrix& base, const DataMatrix& queries, Index k) {
  if (queries.cols() > 0 && queries.rows() != base.rows())
    throw DimensionError("ground truth: query and base dimensions differ");
  GroundTruth gt;
  gt.k = k;
  gt.rows.resize(static_cast<std::size_t>(queries.cols()));
  const ChunkPlan plan{gt.rows.size(), 8};
  parallel_chunks(plan.count(), [&](std::size_t c) {
    for (std::size_t j = plan.begin(c); j < plan.end(c); ++j)
      gt.rows[j] = euclid_topk(base, queries.col(static_cast<Index>(j)), k);
  });
  return gt;
}

/// |TE intersect TH| / |TE|.
inline double recall_at(std::span<const Index> truth, std::span<const Index> retrieved) {
  if (truth.empty()) throw DimensionError("recall_at: empty ground-truth set");
  std::vector<Index> a(truth.begin(), truth.end());
  std::vector<Index> b(retrieved.begin(), retrieved.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  std::vector<Index> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
  return static_cast<double>(both.size()) / static_cast<double>(truth.size());
}

struct RecallCurve {
  std::vector<double> values;  // values[i-1] = Recall@i
  double m_recall = 0.0;
  Index k = 0;
  Index max_retrieved = 0;
};

/// Mean of Recall@i over i = 1..K. Clamped to the curve's range so rounding in
/// the sum cannot move it outside [min, max]; a constant curve returns itself.
inline double m_recall(std::span<const double> curve) {
  if (curve.empty()) throw DimensionError("m_recall: empty curve");
  double s = 0.0;
  for (double v : curve) s += v;
  const auto [lo, hi] = std::minmax_element(curve.begin(), curve.end());
  return std::clamp(s / static_cast<double>(curve.size()), *lo, *hi);
}

/// Recall@i for i = 1..K averaged over queries, from one Hamming ordering per
/// query. Hits are accumulated as integers so Recall@N is exactly 1.
inline RecallCurve recall_curve(const GroundTruth& gt, const BinaryCodes& base,
                                const BinaryCodes& queries, Index max_retrieved) {
  if (max_retrieved < 1 || max_retrieved > base.count())
    throw DimensionError("recall_curve: K=" + std::to_string(max_retrieved) + " not in [1, N=" +
                         std::to_string(base.count()) + "]");
  if (queries.count() != gt.queries())
    throw DimensionError("recall_curve: query count differs from ground truth");
  if (queries.bits() != base.bits()) throw DimensionError("recall_curve: code lengths differ");
  if (gt.k < 1) throw DimensionError("recall_curve: k must be positive");

  const auto kk = static_cast<std::size_t>(max_retrieved);
  const ChunkPlan plan{static_cast<std::size_t>(queries.count()), 8};
  std::vector<std::vector<std::int64_t>> partial(plan.count());
  parallel_chunks(plan.count(), [&](std::size_t c) {
    auto& hits_at = partial[c];
    hits_at.assign(kk, 0);
    std::vector<char> is_true(static_cast<std::size_t>(base.count()), 0);
    for (std::size_t j = plan.begin(c); j < plan.end(c); ++j) {
      const auto& truth = gt.rows[j];
      for (Index t : truth) is_true[static_cast<std::size_t>(t)] = 1;
      const auto order = hamming_order(base, queries.code(static_cast<Index>(j)));
      std::int64_t hits = 0;
      for (std::size_t i = 0; i < kk; ++i) {
        if (is_true[static_cast<std::size_t>(order[i])]) ++hits;
        hits_at[i] += hits;
      }
      for (Index t : truth) is_true[static_cast<std::size_t>(t)] = 0;
    }
  });

  std::vector<std::int64_t> total(kk, 0);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < kk; ++i) total[i] += p[i];
  RecallCurve curve;
  curve.k = gt.k;
  curve.max_retrieved = max_retrieved;
  curve.values.resize(kk);
  const double denom = static_cast<double>(gt.k) * static_cast<double>(gt.queries());
  for (std::size_t i = 0; i < kk; ++i)
    curve.values[i] = gt.queries() == 0 ? 0.0 : static_cast<double>(total[i]) / denom;
  curve.m_recall = m_recall(curve.values);
  return curve;
}

// --- Codes file (.ajbc) ------------------------------------------------------
//   "AJBC", uint32 bits, uint64 N, then N * ceil(bits/8) packed bytes.

inline void write_codes(const std::string& path, const BinaryCodes& c) {
  detail::ByteWriter w;
  w.put_magic("AJBC");
  w.put(static_cast<std::uint32_t>(c.bits()));
  w.put(static_cast<std::uint64_t>(c.count()));
  w.put_bytes(c.packed().data(), c.packed().size());
  w.save(path);
}

inline BinaryCodes read_codes(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::ByteReader rd(bytes, "codes '" + path + "'");
  rd.expect_magic("AJBC");
  const auto bits = static_cast<Index>(rd.get<std::uint32_t>());
  const auto n = static_cast<Index>(rd.get<std::uint64_t>());
  if (bits < 1) throw FormatError("codes: zero bits");
  const auto len = static_cast<std::size_t>(n * ((bits + 7) / 8));
  const std::uint8_t* p = rd.take(len);
  if (!rd.done()) throw FormatError("codes: trailing bytes");
  return BinaryCodes::from_packed(bits, n, std::vector<std::uint8_t>(p, p + len));
}

// --- Ground truth file (.ajbg) -----------------------------------------------
//   "AJBG", uint32 k, uint32 Q, then per query k uint32 base indices.

inline void write_ground_truth(const std::string& path, const GroundTruth& gt) {
  detail::ByteWriter w;
  w.put_magic("AJBG");
  w.put(static_cast<std::uint32_t>(gt.k));
  w.put(static_cast<std::uint32_t>(gt.queries()));
  for (const auto& row : gt.rows) {
    if (static_cast<Index>(row.size()) != gt.k) throw DimensionError("ground truth: ragged row");
    for (Index i : row) w.put(static_cast<std::uint32_t>(i));
  }
  w.save(path);
}

inline GroundTruth read_ground_truth(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::ByteReader rd(bytes, "ground truth '" + path + "'");
  rd.expect_magic("AJBG");
  GroundTruth gt;
  gt.k = rd.get<std::uint32_t>();
  const auto q = rd.get<std::uint32_t>();
  gt.rows.assign(q, std::vector<Index>(static_cast<std::size_t>(gt.k)));
  for (auto& row : gt.rows)
    for (auto& v : row) v = rd.get<std::uint32_t>();
  if (!rd.done()) throw FormatError("ground truth: trailing bytes");
  return gt;
}

}  // namespace ajb
