#pragma once

// Local tangent-space estimation and the closest-point projection oracles.
//
// The projection f(x) = argmin_{m in M} ||x - m||^2 has Jacobian T_m T_m^T at
// every on-manifold point m, where T_m is an orthonormal tangent basis. The
// oracles below provide f in closed form for an affine subspace and for the
// unit sphere so that statement can be checked numerically.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "autojacobin/binary_io.hpp"
#include "autojacobin/errors.hpp"
#include "autojacobin/matrix_io.hpp"
#include "autojacobin/parallel.hpp"

namespace ajb {

struct TangentBasis {
  Index point_index = 0;
  Matrix basis;  // D x r, orthonormal columns
  bool degenerate = false;

  Index dims() const { return basis.rows(); }
  Index rank() const { return basis.cols(); }
};

/// Indices of the k points nearest to column i (self included), ascending by
/// Euclidean distance with ties broken by ascending index.
inline std::vector<Index> knn_bruteforce(const DataMatrix& x, Index i, Index k) {
  const Index n = x.cols();
  if (i < 0 || i >= n) throw DimensionError("knn_bruteforce: point index out of range");
  if (k < 1 || k > n)
    throw DimensionError("knn_bruteforce: k=" + std::to_string(k) + " not in [1, " +
                         std::to_string(n) + "]");
  const Eigen::RowVectorXd dist = (x.colwise() - x.col(i)).colwise().squaredNorm();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  auto closer = [&](Index a, Index b) {
    return dist(a) < dist(b) || (dist(a) == dist(b) && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), closer);
  order.resize(static_cast<std::size_t>(k));
  return order;
}

/// Fraction of total local variance the retained directions must capture.
inline constexpr double kTangentEnergy = 0.98;

/// Local PCA on the D+d nearest neighbours of x_i. Keeps min(r98, d)
/// principal directions, where r98 is the smallest rank holding 98% of the
/// centered variance. Identical neighbourhoods give an empty, degenerate basis.
inline TangentBasis estimate_tangent(const DataMatrix& x, Index i, Index bits) {
  const Index dims = x.rows();
  const Index k = dims + bits;
  if (x.cols() < k)
    throw DimensionError("estimate_tangent: need at least D+d=" + std::to_string(k) +
                         " points, have " + std::to_string(x.cols()));
  const auto nbrs = knn_bruteforce(x, i, k);
  Matrix local(dims, k);
  for (Index j = 0; j < k; ++j) local.col(j) = x.col(nbrs[static_cast<std::size_t>(j)]);
  const Vector mean = local.rowwise().mean();
  local.colwise() -= mean;
  const Matrix cov = local * local.transpose();

  TangentBasis out;
  out.point_index = i;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw DegenerateError("estimate_tangent: eigensolver failed");
  // Eigen sorts eigenvalues ascending.
  const Vector evals = eig.eigenvalues().reverse().cwiseMax(0.0);
  const double total = evals.sum();
  if (!(total > 0.0)) {
    out.basis = Matrix(dims, 0);
    out.degenerate = true;
    return out;
  }
  Index r98 = 0;
  double acc = 0.0;
  while (r98 < dims && acc < kTangentEnergy * total) acc += evals(r98++);
  const Index r = std::min(r98, bits);
  out.basis = eig.eigenvectors().rightCols(r).rowwise().reverse();
  return out;
}

inline std::vector<TangentBasis> estimate_all_tangents(const DataMatrix& x, Index bits) {
  const auto n = static_cast<std::size_t>(x.cols());
  std::vector<TangentBasis> out(n);
  ChunkPlan plan{n, 16};
  parallel_chunks(plan.count(), [&](std::size_t c) {
    for (std::size_t i = plan.begin(c); i < plan.end(c); ++i)
      out[i] = estimate_tangent(x, static_cast<Index>(i), bits);
  });
  return out;
}

/// A = T T^T: symmetric, idempotent, trace r. r = 0 gives the zero matrix.
inline Matrix projector(const TangentBasis& t) { return t.basis * t.basis.transpose(); }

inline double orthonormality_error(const Matrix& basis) {
  if (basis.cols() == 0) return 0.0;
  return (basis.transpose() * basis - Matrix::Identity(basis.cols(), basis.cols()))
      .cwiseAbs()
      .maxCoeff();
}

// --- Tangent cache (.ajbt) -------------------------------------------------
//   "AJBT", uint32 D, uint32 d, uint32 N, then per point: uint32 r followed by
//   the D x r basis as column-major float64.

inline void write_tangent_cache(const std::string& path, const std::vector<TangentBasis>& bases,
                                Index dims, Index bits) {
  detail::ByteWriter w;
  w.put_magic("AJBT");
  w.put(static_cast<std::uint32_t>(dims));
  w.put(static_cast<std::uint32_t>(bits));
  w.put(static_cast<std::uint32_t>(bases.size()));
  for (const auto& t : bases) {
    if (t.basis.rows() != dims && t.rank() > 0)
      throw DimensionError("write_tangent_cache: basis has wrong row count");
    w.put(static_cast<std::uint32_t>(t.rank()));
    for (Index c = 0; c < t.rank(); ++c)
      for (Index r = 0; r < dims; ++r) w.put(t.basis(r, c));
  }
  w.save(path);
}

struct TangentCache {
  Index dims = 0;
  Index bits = 0;
  std::vector<TangentBasis> bases;
};

inline TangentCache read_tangent_cache(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::ByteReader rd(bytes, "tangent cache '" + path + "'");
  rd.expect_magic("AJBT");
  TangentCache out;
  out.dims = rd.get<std::uint32_t>();
  out.bits = rd.get<std::uint32_t>();
  const auto n = rd.get<std::uint32_t>();
  out.bases.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto r = static_cast<Index>(rd.get<std::uint32_t>());
    if (r > out.dims) throw FormatError("tangent cache: rank exceeds dimension");
    auto& t = out.bases[i];
    t.point_index = i;
    t.basis.resize(out.dims, r);
    t.degenerate = (r == 0);
    for (Index c = 0; c < r; ++c)
      for (Index row = 0; row < out.dims; ++row) t.basis(row, c) = rd.get<double>();
  }
  if (!rd.done()) throw FormatError("tangent cache: trailing bytes");
  return out;
}

// --- Closest-point oracles ---------------------------------------------------

enum class ManifoldKind { affine_subspace, unit_sphere };

struct ProjectionOracle {
  ManifoldKind kind = ManifoldKind::unit_sphere;
  Vector origin;  // affine only
  Matrix basis;   // affine only, D x r orthonormal
  Index dims = 0;

  static ProjectionOracle affine(Vector origin, Matrix basis) {
    if (origin.size() != basis.rows())
      throw DimensionError("affine oracle: origin and basis dimensions differ");
    if (orthonormality_error(basis) > 1e-10)
      throw DegenerateError("affine oracle: basis is not orthonormal");
    ProjectionOracle o;
    o.kind = ManifoldKind::affine_subspace;
    o.dims = origin.size();
    o.origin = std::move(origin);
    o.basis = std::move(basis);
    return o;
  }

  static ProjectionOracle sphere(Index dims) {
    ProjectionOracle o;
    o.kind = ManifoldKind::unit_sphere;
    o.dims = dims;
    return o;
  }
};

inline Vector oracle_project(const ProjectionOracle& o, const Vector& x) {
  if (x.size() != o.dims) throw DimensionError("oracle_project: dimension mismatch");
  switch (o.kind) {
    case ManifoldKind::affine_subspace:
      return o.origin + o.basis * (o.basis.transpose() * (x - o.origin));
    case ManifoldKind::unit_sphere: {
      const double n = x.norm();
      if (!(n > 0.0)) throw DegenerateError("oracle_project: projection of 0 onto the sphere is undefined");
      return x / n;
    }
  }
  return x;
}

/// Analytic tangent projector at an on-manifold point m.
inline Matrix oracle_tangent_projector(const ProjectionOracle& o, const Vector& m) {
  switch (o.kind) {
    case ManifoldKind::affine_subspace:
      return o.basis * o.basis.transpose();
    case ManifoldKind::unit_sphere: {
      const Vector u = m.normalized();
      return Matrix::Identity(o.dims, o.dims) - u * u.transpose();
    }
  }
  return {};
}

/// Central finite-difference Jacobian of oracle_project at m, laid out as
/// J(i, j) = d f_j / d x_i.
inline Matrix oracle_jacobian_fd(const ProjectionOracle& o, const Vector& m, double h) {
  if (!(h > 0.0)) throw DimensionError("oracle_jacobian_fd: step must be positive");
  const Index dims = m.size();
  Matrix jac(dims, dims);
  Vector xp = m;
  Vector xm = m;
  for (Index i = 0; i < dims; ++i) {
    xp(i) = m(i) + h;
    xm(i) = m(i) - h;
    jac.row(i) = ((oracle_project(o, xp) - oracle_project(o, xm)) / (2.0 * h)).transpose();
    xp(i) = m(i);
    xm(i) = m(i);
  }
  return jac;
}

}  // namespace ajb
