#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "test_util.hpp"

namespace ajb {
namespace {

TEST(Knn, CollinearPoints) {
  DataMatrix x(1, 3);
  x << 0, 1, 3;
  EXPECT_EQ(knn_bruteforce(x, 0, 2), (std::vector<Index>{0, 1}));
}

TEST(Knn, DuplicatesPutSelfFirst) {
  DataMatrix x = DataMatrix::Ones(2, 4);
  EXPECT_EQ(knn_bruteforce(x, 2, 4), (std::vector<Index>{0, 1, 2, 3}));
  x.col(3).setZero();
  // Point 1 is tied with 0 and 2; ties go to the lower index, self included.
  EXPECT_EQ(knn_bruteforce(x, 1, 3), (std::vector<Index>{0, 1, 2}));
}

TEST(Knn, MatchesFullSort) {
  std::mt19937_64 rng(11);
  const DataMatrix x = testing::gaussian(8, 50, 1.0, rng);
  for (Index i = 0; i < x.cols(); ++i) {
    std::vector<std::pair<double, Index>> all;
    for (Index j = 0; j < x.cols(); ++j) all.emplace_back((x.col(j) - x.col(i)).squaredNorm(), j);
    std::sort(all.begin(), all.end());
    for (Index k = 1; k <= x.cols(); ++k) {
      const auto got = knn_bruteforce(x, i, k);
      ASSERT_EQ(static_cast<Index>(got.size()), k);
      for (Index t = 0; t < k; ++t) ASSERT_EQ(got[static_cast<std::size_t>(t)], all[static_cast<std::size_t>(t)].second);
    }
  }
}

TEST(Knn, KLargerThanNRejected) {
  EXPECT_THROW(knn_bruteforce(DataMatrix::Zero(2, 3), 0, 4), DimensionError);
}

TEST(Tangent, PlaneThroughOrigin) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DataMatrix x = DataMatrix::Zero(3, 60);
  for (Index j = 0; j < x.cols(); ++j) {
    x(0, j) = u(rng);
    x(1, j) = u(rng);
  }
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 0) = expected(1, 1) = 1.0;
  for (Index i = 0; i < x.cols(); ++i) {
    const TangentBasis t = estimate_tangent(x, i, 2);
    EXPECT_FALSE(t.degenerate);
    EXPECT_LT((projector(t) - expected).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Tangent, IdenticalNeighboursAreDegenerate) {
  const DataMatrix x = DataMatrix::Constant(4, 10, 0.25);
  const TangentBasis t = estimate_tangent(x, 3, 2);
  EXPECT_TRUE(t.degenerate);
  EXPECT_EQ(t.rank(), 0);
  EXPECT_EQ(projector(t), Matrix::Zero(4, 4));
}

TEST(Tangent, SphereCapIsOrthogonalToNormal) {
  std::mt19937_64 rng(4);
  const Matrix m_basis = random_orthonormal(3, 1, rng);
  const Vector m = m_basis.col(0);
  const double radius = 1e-2;
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DataMatrix x(3, 200);
  x.col(0) = m;
  for (Index j = 1; j < x.cols(); ++j) {
    Vector v(3);
    for (Index i = 0; i < 3; ++i) v(i) = g(rng);
    v -= v.dot(m) * m;
    v.normalize();
    x.col(j) = (m + radius * std::sqrt(u(rng)) * v).normalized();
  }
  const TangentBasis t = estimate_tangent(x, 0, 2);
  ASSERT_EQ(t.rank(), 2);
  for (Index c = 0; c < 2; ++c) EXPECT_LT(std::abs(t.basis.col(c).dot(m)), std::sin(1e-2));
}

TEST(Tangent, RankNeverExceedsBitsAndMatchesSvd) {
  std::mt19937_64 rng(8);
  const DataMatrix x = testing::gaussian(6, 40, 1.0, rng);
  const Index bits = 3;
  for (Index i = 0; i < x.cols(); i += 7) {
    const TangentBasis t = estimate_tangent(x, i, bits);
    EXPECT_LE(t.rank(), bits);
    EXPECT_LT(orthonormality_error(t.basis), 1e-12);
    // Independent route: SVD of the centered neighbourhood.
    const auto nbrs = knn_bruteforce(x, i, x.rows() + bits);
    Matrix local(x.rows(), static_cast<Index>(nbrs.size()));
    for (std::size_t j = 0; j < nbrs.size(); ++j) local.col(static_cast<Index>(j)) = x.col(nbrs[j]);
    local.colwise() -= local.rowwise().mean();
    Eigen::JacobiSVD<Matrix> svd(local, Eigen::ComputeFullU);
    const Matrix u = svd.matrixU().leftCols(t.rank());
    EXPECT_LT((projector(t) - u * u.transpose()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Projector, CoordinatePlane) {
  TangentBasis t;
  t.basis = Matrix::Identity(3, 2);
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 0) = expected(1, 1) = 1.0;
  EXPECT_EQ(projector(t), expected);
  t.basis = Matrix(3, 0);
  EXPECT_EQ(projector(t), Matrix::Zero(3, 3));
}

TEST(Projector, SymmetricAndIdempotent) {
  std::mt19937_64 rng(6);
  TangentBasis t;
  t.basis = random_orthonormal(7, 3, rng);
  const Matrix a = projector(t);
  EXPECT_LT((a * a - a).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((a.transpose() - a).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TangentCache, RoundTrip) {
  testing::TempDir dir("tcache");
  std::mt19937_64 rng(3);
  const DataMatrix x = testing::gaussian(5, 20, 1.0, rng);
  auto bases = estimate_all_tangents(x, 2);
  bases[4].basis = Matrix(5, 0);
  bases[4].degenerate = true;
  write_tangent_cache(dir.file("c.ajbt"), bases, 5, 2);
  const TangentCache c = read_tangent_cache(dir.file("c.ajbt"));
  EXPECT_EQ(c.dims, 5);
  EXPECT_EQ(c.bits, 2);
  ASSERT_EQ(c.bases.size(), bases.size());
  for (std::size_t i = 0; i < bases.size(); ++i) {
    EXPECT_EQ(c.bases[i].basis, bases[i].basis);
    EXPECT_EQ(c.bases[i].degenerate, bases[i].degenerate);
  }
}

TEST(ParallelTangents, MatchSerialEstimates) {
  std::mt19937_64 rng(12);
  const DataMatrix x = testing::gaussian(4, 70, 1.0, rng);
  const auto all = estimate_all_tangents(x, 2);
  for (Index i = 0; i < x.cols(); ++i)
    EXPECT_EQ(all[static_cast<std::size_t>(i)].basis, estimate_tangent(x, i, 2).basis);
}

TEST(Oracle, AffineProjection) {
  Vector origin = Vector::Zero(3);
  const auto o = ProjectionOracle::affine(origin, Matrix::Identity(3, 2));
  Vector x(3);
  x << 1, 2, 3;
  Vector expected(3);
  expected << 1, 2, 0;
  EXPECT_EQ(oracle_project(o, x), expected);
}

TEST(Oracle, SphereProjection) {
  const auto o = ProjectionOracle::sphere(3);
  Vector x(3);
  x << 0, 0, 2;
  Vector expected(3);
  expected << 0, 0, 1;
  EXPECT_EQ(oracle_project(o, x), expected);
  EXPECT_THROW(oracle_project(o, Vector::Zero(3)), DegenerateError);
}

TEST(Oracle, OnManifoldPointsAreFixed) {
  std::mt19937_64 rng(5);
  const AffineSample s = sample_affine(6, 2, 5, 0.0, rng);
  const auto o = ProjectionOracle::affine(s.origin, s.basis);
  for (Index j = 0; j < s.points.cols(); ++j)
    EXPECT_LT((oracle_project(o, s.points.col(j)) - s.points.col(j)).cwiseAbs().maxCoeff(), 1e-12);
  const auto sph = ProjectionOracle::sphere(4);
  const Vector m = random_orthonormal(4, 1, rng).col(0);
  EXPECT_LT((oracle_project(sph, m) - m).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Oracle, FiniteDifferenceJacobianOfPlane) {
  const auto o = ProjectionOracle::affine(Vector::Zero(3), Matrix::Identity(3, 2));
  Vector m(3);
  m << 0.3, -0.4, 0.0;
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 0) = expected(1, 1) = 1.0;
  EXPECT_LT((oracle_jacobian_fd(o, m, 1e-5) - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Oracle, FiniteDifferenceJacobianOfSphere) {
  const auto o = ProjectionOracle::sphere(3);
  Vector m(3);
  m << 0, 0, 1;
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 0) = expected(1, 1) = 1.0;
  EXPECT_LT((oracle_jacobian_fd(o, m, 1e-5) - expected).cwiseAbs().maxCoeff(), 1e-6);

  std::mt19937_64 rng(10);
  for (Index dims = 3; dims <= 10; ++dims) {
    const Vector r = random_orthonormal(dims, 1, rng).col(0);
    const Matrix analytic = Matrix::Identity(dims, dims) - r * r.transpose();
    const auto s = ProjectionOracle::sphere(dims);
    EXPECT_LT((oracle_jacobian_fd(s, r, 1e-5) - analytic).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT((oracle_tangent_projector(s, r) - analytic).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Oracle, AffineRejectsNonOrthonormalBasis) {
  Matrix b = Matrix::Identity(3, 2);
  b(0, 1) = 0.5;
  EXPECT_THROW(ProjectionOracle::affine(Vector::Zero(3), b), DegenerateError);
}

}  // namespace
}  // namespace ajb
