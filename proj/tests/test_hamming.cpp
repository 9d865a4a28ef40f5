#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "test_util.hpp"

namespace ajb {
namespace {

using testing::gaussian;

TEST(Encode, IdentityWeights) {
  NetworkParams p = NetworkParams::zeros(2, 2);
  p.w1 = Matrix::Identity(2, 2);
  DataMatrix x(2, 1);
  x << 0.3, -0.2;
  const BinaryCodes c = encode(p, x);
  EXPECT_TRUE(c.bit(0, 0));
  EXPECT_FALSE(c.bit(0, 1));
}

TEST(Encode, ScaleInvariantWithoutBias) {
  std::mt19937_64 rng(1);
  const NetworkParams p = testing::random_params(6, 20, rng);
  const DataMatrix x = gaussian(6, 25, 1.0, rng);
  EXPECT_EQ(encode(p, 2.0 * x), encode(p, x));
}

TEST(Encode, BiasSwitch) {
  NetworkParams p = NetworkParams::zeros(1, 1);
  p.w1(0, 0) = 1.0;
  p.b1(0) = 1.0;
  DataMatrix x(1, 1);
  x << -0.5;
  EXPECT_FALSE(encode(p, x).bit(0, 0));
  EXPECT_TRUE(encode(p, x, true).bit(0, 0));
}

TEST(Encode, UnpackReproducesSigns) {
  std::mt19937_64 rng(2);
  const NetworkParams p = testing::random_params(9, 37, rng);
  const DataMatrix x = gaussian(9, 3000, 1.0, rng);
  const Matrix signs = (p.w1 * x).unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
  EXPECT_EQ(encode(p, x).unpack(), signs);
}

TEST(Encode, DimensionMismatchRejected) {
  EXPECT_THROW(encode(NetworkParams::zeros(4, 2), DataMatrix::Ones(3, 2)), DimensionError);
}

TEST(Codes, FileRoundTrip) {
  testing::TempDir dir("codes");
  std::mt19937_64 rng(3);
  const BinaryCodes c = oracle::random_codes(13, 40, rng);
  write_codes(dir.file("c.ajbc"), c);
  EXPECT_EQ(read_codes(dir.file("c.ajbc")), c);
}

TEST(Codes, TrailingBitsMustBeZero) {
  EXPECT_THROW(BinaryCodes::from_packed(3, 1, {0x08}), FormatError);
  EXPECT_NO_THROW(BinaryCodes::from_packed(3, 1, {0x07}));
}

TEST(HammingTopk, ExactMatchFirst) {
  BinaryCodes base(16, 10);
  for (Index i = 0; i < 10; ++i)
    for (Index j = 0; j < 16; ++j) base.set_bit(i, j, i == 7 ? false : true);
  BinaryCodes q(16, 1);
  EXPECT_EQ(hamming_topk(base, q.code_span(0), 1), (std::vector<Index>{7}));
}

TEST(HammingTopk, TiesByIndex) {
  BinaryCodes base(8, 6);
  BinaryCodes q(8, 1);
  q.set_bit(0, 3, true);
  EXPECT_EQ(hamming_topk(base, q.code_span(0), 3), (std::vector<Index>{0, 1, 2}));
}

TEST(HammingTopk, MatchesBitLoopOracle) {
  std::mt19937_64 rng(4);
  const BinaryCodes base = oracle::random_codes(64, 1000, rng);
  const BinaryCodes qs = oracle::random_codes(64, 20, rng);
  for (Index q = 0; q < qs.count(); ++q)
    for (Index i : {1, 10, 100})
      EXPECT_EQ(hamming_topk(base, qs.code_span(q), i), oracle::hamming_topk(base, qs, q, i));
}

TEST(HammingTopk, ManyTiesAndOddLengths) {
  std::mt19937_64 rng(5);
  for (Index bits : {1, 7, 63, 65, 130}) {
    const BinaryCodes base = oracle::random_codes(bits, 300, rng, 6);
    const BinaryCodes qs = oracle::random_codes(bits, 5, rng, 6);
    for (Index q = 0; q < qs.count(); ++q)
      EXPECT_EQ(hamming_topk(base, qs.code_span(q), 300), oracle::hamming_topk(base, qs, q, 300));
  }
}

TEST(HammingTopk, CountOutOfRange) {
  BinaryCodes base(8, 4);
  EXPECT_THROW(hamming_topk(base, base.code_span(0), 5), DimensionError);
}

TEST(EuclidTopk, PointsOnALine) {
  DataMatrix base(1, 3);
  base << 0, 1, 3;
  Vector q(1);
  q << 0.9;
  EXPECT_EQ(euclid_topk(base, q, 2), (std::vector<Index>{1, 0}));
}

TEST(EuclidTopk, QueryOnBasePoint) {
  std::mt19937_64 rng(6);
  const DataMatrix base = gaussian(5, 40, 1.0, rng);
  EXPECT_EQ(euclid_topk(base, base.col(17), 1), (std::vector<Index>{17}));
}

TEST(EuclidTopk, MatchesFullSort) {
  std::mt19937_64 rng(7);
  const DataMatrix base = gaussian(16, 500, 1.0, rng);
  const DataMatrix qs = gaussian(16, 10, 1.0, rng);
  for (Index q = 0; q < qs.cols(); ++q)
    EXPECT_EQ(euclid_topk(base, qs.col(q), 50), oracle::euclid_topk(base, qs.col(q), 50));
}

TEST(EuclidTopk, DuplicatePointsTieByIndex) {
  DataMatrix base = DataMatrix::Zero(2, 5);
  base.col(1) << 1, 0;
  base.col(3) << 1, 0;
  Vector q(2);
  q << 1, 0;
  EXPECT_EQ(euclid_topk(base, q, 2), (std::vector<Index>{1, 3}));
}

TEST(Rerank, KeepsTrueTopK) {
  std::mt19937_64 rng(8);
  const DataMatrix base = gaussian(4, 100, 1.0, rng);
  const Vector q = gaussian(4, 1, 1.0, rng).col(0);
  const auto top = euclid_topk(base, q, 5);
  EXPECT_EQ(rerank(base, top, q, 5), top);
  std::vector<Index> all(100);
  std::iota(all.begin(), all.end(), Index{0});
  EXPECT_EQ(rerank(base, all, q, 7), euclid_topk(base, q, 7));
}

TEST(Rerank, ResultIsSubsetOfCandidates) {
  std::mt19937_64 rng(9);
  const DataMatrix base = gaussian(4, 200, 1.0, rng);
  std::uniform_int_distribution<Index> pick(0, 199);
  for (int t = 0; t < 20; ++t) {
    std::vector<Index> cand;
    for (int i = 0; i < 30; ++i) cand.push_back(pick(rng));
    const auto out = rerank(base, cand, gaussian(4, 1, 1.0, rng).col(0), 10);
    for (Index i : out) EXPECT_NE(std::find(cand.begin(), cand.end(), i), cand.end());
  }
  EXPECT_THROW(rerank(base, std::vector<Index>{1, 2}, Vector::Zero(4), 3), DimensionError);
}

TEST(RecallAt, Basics) {
  const std::vector<Index> truth{1, 2, 3, 4};
  EXPECT_EQ(recall_at(truth, std::vector<Index>{4, 3, 2, 1, 9}), 1.0);
  EXPECT_EQ(recall_at(truth, std::vector<Index>{5, 6}), 0.0);
  EXPECT_EQ(recall_at(truth, std::vector<Index>{2, 9, 4}), 0.5);
  EXPECT_THROW(recall_at(std::vector<Index>{}, truth), DimensionError);
}

TEST(MRecall, ConstantAndLinearCurves) {
  EXPECT_EQ(m_recall(std::vector<double>(37, 0.625)), 0.625);
  EXPECT_EQ(m_recall(std::vector<double>(1234, 0.3)), 0.3);
  EXPECT_EQ(m_recall(std::vector<double>(2000, 0.1)), 0.1);
  const Index K = 200;
  std::vector<double> lin;
  for (Index i = 1; i <= K; ++i) lin.push_back(static_cast<double>(i) / K);
  EXPECT_NEAR(m_recall(lin), (K + 1.0) / (2.0 * K), 1e-15);
}

TEST(RecallCurve, PerfectHashReachesOneAtK) {
  // Point j sits at distance j from the query in both spaces.
  const Index n = 50;
  DataMatrix base(1, n);
  BinaryCodes codes(64, n);
  for (Index j = 0; j < n; ++j) {
    base(0, j) = static_cast<double>(j);
    for (Index b = 0; b < j; ++b) codes.set_bit(j, b, true);
  }
  DataMatrix query = DataMatrix::Zero(1, 1);
  const BinaryCodes qcode(64, 1);
  const Index k = 5;
  const GroundTruth gt = compute_ground_truth(base, query, k);
  const RecallCurve c = recall_curve(gt, codes, qcode, n);
  for (Index i = 1; i <= n; ++i)
    EXPECT_EQ(c.values[static_cast<std::size_t>(i - 1)], std::min<double>(1.0, static_cast<double>(i) / k));
}

TEST(RecallCurve, NonDecreasingAndOneAtN) {
  std::mt19937_64 rng(10);
  const DataMatrix base = gaussian(8, 300, 1.0, rng);
  const DataMatrix qs = gaussian(8, 17, 1.0, rng);
  const NetworkParams p = lsh_generate(8, 12, 3);
  const GroundTruth gt = compute_ground_truth(base, qs, 10);
  const RecallCurve c = recall_curve(gt, encode(p, base), encode(p, qs), 300);
  for (std::size_t i = 1; i < c.values.size(); ++i) EXPECT_GE(c.values[i], c.values[i - 1]);
  EXPECT_EQ(c.values.back(), 1.0);
  EXPECT_THROW(recall_curve(gt, encode(p, base), encode(p, qs), 301), DimensionError);
}

TEST(RecallCurve, MatchesDirectRecallAt) {
  std::mt19937_64 rng(11);
  const DataMatrix base = gaussian(6, 200, 1.0, rng);
  const DataMatrix qs = gaussian(6, 9, 1.0, rng);
  const NetworkParams p = lsh_generate(6, 10, 5);
  const BinaryCodes bc = encode(p, base), qc = encode(p, qs);
  const GroundTruth gt = compute_ground_truth(base, qs, 5);
  const RecallCurve c = recall_curve(gt, bc, qc, 100);
  for (Index i : {1, 7, 50, 100}) {
    double acc = 0.0;
    for (Index q = 0; q < qs.cols(); ++q)
      acc += recall_at(gt.rows[static_cast<std::size_t>(q)], hamming_topk(bc, qc.code_span(q), i));
    EXPECT_NEAR(c.values[static_cast<std::size_t>(i - 1)], acc / qs.cols(), 1e-15);
  }
}

TEST(RecallCurve, RandomCodesFollowDiagonal) {
  std::mt19937_64 rng(12);
  const Index n = 2000, nq = 200;
  const DataMatrix base = gaussian(8, n, 1.0, rng);
  const DataMatrix qs = gaussian(8, nq, 1.0, rng);
  const GroundTruth gt = compute_ground_truth(base, qs, 1);
  const RecallCurve c =
      recall_curve(gt, oracle::random_codes(32, n, rng), oracle::random_codes(32, nq, rng), n);
  for (Index i = n / 10; i < n; i += n / 10) {
    const double p = static_cast<double>(i) / n;
    const double sigma = std::sqrt(p * (1 - p) / nq);
    EXPECT_NEAR(c.values[static_cast<std::size_t>(i - 1)], p, 3 * sigma) << "i=" << i;
  }
}

TEST(GroundTruth, FileRoundTripAndPrefix) {
  testing::TempDir dir("gt");
  std::mt19937_64 rng(13);
  const DataMatrix base = gaussian(5, 80, 1.0, rng);
  const DataMatrix qs = gaussian(5, 6, 1.0, rng);
  const GroundTruth gt = compute_ground_truth(base, qs, 10);
  write_ground_truth(dir.file("g.ajbg"), gt);
  const GroundTruth back = read_ground_truth(dir.file("g.ajbg"));
  EXPECT_EQ(back.k, 10);
  EXPECT_EQ(back.rows, gt.rows);
  EXPECT_EQ(gt.prefix(3).rows, compute_ground_truth(base, qs, 3).rows);
  EXPECT_THROW(gt.prefix(11), DimensionError);
}

}  // namespace
}  // namespace ajb
