#include <gtest/gtest.h>

#include "test_util.hpp"

namespace ajb {
namespace {

using testing::TempDir;

TEST(Fvecs, ReadsSingleRecord) {
  TempDir dir("fvecs");
  std::vector<unsigned char> b;
  testing::append_i32(b, 2);
  testing::append_f32(b, 1.0f);
  testing::append_f32(b, 2.0f);
  testing::write_raw(dir.file("a.fvecs"), b);
  const DataMatrix x = read_fvecs(dir.file("a.fvecs"));
  ASSERT_EQ(x.rows(), 2);
  ASSERT_EQ(x.cols(), 1);
  EXPECT_EQ(x(0, 0), 1.0);
  EXPECT_EQ(x(1, 0), 2.0);
}

TEST(Fvecs, EmptyFileGivesNoColumns) {
  TempDir dir("fvecs");
  testing::write_raw(dir.file("e.fvecs"), {});
  EXPECT_EQ(read_fvecs(dir.file("e.fvecs")).cols(), 0);
}

TEST(Fvecs, InconsistentDimensionsRejected) {
  TempDir dir("fvecs");
  std::vector<unsigned char> b;
  testing::append_i32(b, 2);
  testing::append_f32(b, 1.0f);
  testing::append_f32(b, 2.0f);
  testing::append_i32(b, 3);
  for (int i = 0; i < 3; ++i) testing::append_f32(b, 0.5f);
  testing::write_raw(dir.file("bad.fvecs"), b);
  EXPECT_THROW(read_fvecs(dir.file("bad.fvecs")), FormatError);
}

TEST(Fvecs, NonPositiveDimensionRejected) {
  TempDir dir("fvecs");
  std::vector<unsigned char> b;
  testing::append_i32(b, 0);
  testing::write_raw(dir.file("z.fvecs"), b);
  EXPECT_THROW(read_fvecs(dir.file("z.fvecs")), FormatError);
  b.clear();
  testing::append_i32(b, -4);
  testing::write_raw(dir.file("n.fvecs"), b);
  EXPECT_THROW(read_fvecs(dir.file("n.fvecs")), FormatError);
}

TEST(Fvecs, TruncatedRecordRejected) {
  TempDir dir("fvecs");
  std::vector<unsigned char> b;
  testing::append_i32(b, 3);
  testing::append_f32(b, 1.0f);
  testing::append_f32(b, 2.0f);
  testing::write_raw(dir.file("t.fvecs"), b);
  EXPECT_THROW(read_fvecs(dir.file("t.fvecs")), FormatError);
}

TEST(Fvecs, RoundTripIsExactForFloatData) {
  TempDir dir("fvecs");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> u(-5.0f, 5.0f);
  DataMatrix x(7, 10);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  write_fvecs(dir.file("r.fvecs"), x);
  EXPECT_EQ(read_fvecs(dir.file("r.fvecs")), x);
}

TEST(Bvecs, ReadsBytesAsUnsigned) {
  TempDir dir("bvecs");
  std::vector<unsigned char> b;
  testing::append_i32(b, 4);
  for (unsigned char c : {0x00, 0x7F, 0xFF, 0x01}) b.push_back(c);
  testing::write_raw(dir.file("a.bvecs"), b);
  const DataMatrix x = read_bvecs(dir.file("a.bvecs"));
  ASSERT_EQ(x.rows(), 4);
  EXPECT_EQ(x(0, 0), 0.0);
  EXPECT_EQ(x(1, 0), 127.0);
  EXPECT_EQ(x(2, 0), 255.0);
  EXPECT_EQ(x(3, 0), 1.0);
}

TEST(Bvecs, TruncatedPayloadRejected) {
  TempDir dir("bvecs");
  std::vector<unsigned char> b;
  testing::append_i32(b, 4);
  b.push_back(1);
  b.push_back(2);
  testing::write_raw(dir.file("t.bvecs"), b);
  EXPECT_THROW(read_bvecs(dir.file("t.bvecs")), FormatError);
}

TEST(Bvecs, RandomRecordsRoundTrip) {
  TempDir dir("bvecs");
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> u(0, 255);
  DataMatrix x(12, 10);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  write_bvecs(dir.file("r.bvecs"), x);
  EXPECT_EQ(read_bvecs(dir.file("r.bvecs")), x);
}

TEST(Bvecs, WriterRejectsNonByteValues) {
  TempDir dir("bvecs");
  DataMatrix x(1, 1);
  x(0, 0) = 256.0;
  EXPECT_THROW(write_bvecs(dir.file("x.bvecs"), x), FormatError);
  x(0, 0) = 1.5;
  EXPECT_THROW(write_bvecs(dir.file("x.bvecs"), x), FormatError);
}

TEST(TextMatrix, RoundTripKeepsFullPrecision) {
  TempDir dir("text");
  std::mt19937_64 rng(9);
  const DataMatrix x = testing::gaussian(5, 8, 1.0, rng);
  save_matrix(dir.file("m.txt"), x);
  EXPECT_EQ(load_matrix(dir.file("m.txt")), x);
}

TEST(TextMatrix, RejectsGarbage) {
  TempDir dir("text");
  {
    std::ofstream out(dir.file("g.txt"));
    out << "1 2\n3 abc\n";
  }
  EXPECT_THROW(read_text_matrix(dir.file("g.txt")), FormatError);
}

TEST(Normalizer, SingleColumn) {
  DataMatrix x(2, 1);
  x << 3, 4;
  EXPECT_NEAR(fit_normalizer(x).scale, 0.16, 1e-15);
}

TEST(Normalizer, LargestColumnSetsScale) {
  DataMatrix x(2, 2);
  x << 1, 0, 0, 2;
  EXPECT_NEAR(fit_normalizer(x).scale, 0.4, 1e-15);
}

TEST(Normalizer, FitSetMaxNormIsTarget) {
  std::mt19937_64 rng(1);
  const DataMatrix x = testing::gaussian(6, 40, 3.0, rng);
  const Normalizer nz = fit_normalizer(x);
  EXPECT_NEAR(nz.apply(x).colwise().norm().maxCoeff(), 0.8, 1e-12);
}

TEST(Normalizer, AllZeroIsDegenerate) {
  EXPECT_THROW(fit_normalizer(DataMatrix::Zero(3, 4)), DegenerateError);
}

TEST(Normalizer, ApplyAndUnapply) {
  DataMatrix x(2, 1);
  x << 2, 2;
  const Normalizer half{0.5};
  EXPECT_EQ(half.apply(x), DataMatrix::Ones(2, 1));
  std::mt19937_64 rng(2);
  const DataMatrix y = testing::gaussian(4, 9, 2.0, rng);
  EXPECT_EQ(Normalizer{1.0}.apply(y), y);
  const Normalizer nz = fit_normalizer(y);
  EXPECT_LT((nz.unapply(nz.apply(y)) - y).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Normalizer, DimensionMismatchRejected) {
  EXPECT_THROW(apply_normalizer(Normalizer{1.0}, DataMatrix::Ones(3, 2), 4), DimensionError);
  EXPECT_NO_THROW(apply_normalizer(Normalizer{1.0}, DataMatrix::Ones(4, 2), 4));
}

}  // namespace
}  // namespace ajb
