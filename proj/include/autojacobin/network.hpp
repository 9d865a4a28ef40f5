#pragma once

// Three-layer tanh auto-encoder with a Jacobian regularizer.
//
//   y = tanh(W1 x + b1)          hidden, d entries
//   z = tanh(W2 y + b2)          output, D entries
//   J(i, j) = d z_j / d x_i = [W1^T diag(1 - y^2) W2^T diag(1 - z^2)](i, j)
//
// Batch objective over n points, each with a Jacobian target A_i:
//
//   sum_i ||x_i - z_i||^2 + ||J_i - A_i||_F^2  +  alpha * sum_jk sqrt(B_jk^2 + eps)
//
// with B = Y Y^T - n I. The same evaluator also serves the comparison models
// (no Jacobian term, denoising inputs, contractive penalty); see variants.hpp.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "autojacobin/binary_io.hpp"
#include "autojacobin/errors.hpp"
#include "autojacobin/matrix_io.hpp"
#include "autojacobin/parallel.hpp"
#include "autojacobin/tangent.hpp"

namespace ajb {

struct NetworkParams {
  Matrix w1;  // d x D
  Matrix w2;  // D x d
  Vector b1;  // d
  Vector b2;  // D
  double scale = 1.0;

  static NetworkParams zeros(Index dims, Index bits) {
    NetworkParams p;
    p.w1 = Matrix::Zero(bits, dims);
    p.w2 = Matrix::Zero(dims, bits);
    p.b1 = Vector::Zero(bits);
    p.b2 = Vector::Zero(dims);
    return p;
  }

  Index dims() const { return w1.cols(); }
  Index bits() const { return w1.rows(); }
  Index parameter_count() const { return 2 * dims() * bits() + bits() + dims(); }

  void validate() const {
    const Index D = dims(), d = bits();
    if (w2.rows() != D || w2.cols() != d || b1.size() != d || b2.size() != D)
      throw DimensionError("NetworkParams: inconsistent shapes");
    if (!w1.allFinite() || !w2.allFinite() || !b1.allFinite() || !b2.allFinite())
      throw DegenerateError("NetworkParams: non-finite entry");
    if (!(scale > 0.0) || !std::isfinite(scale))
      throw DegenerateError("NetworkParams: scale must be positive");
  }

  /// Flattened parameter vector [vec(W1); vec(W2); b1; b2], column-major.
  Vector to_vector() const {
    Vector theta(parameter_count());
    Index o = 0;
    auto put = [&](const auto& m) {
      theta.segment(o, m.size()) = Eigen::Map<const Vector>(m.data(), m.size());
      o += m.size();
    };
    put(w1);
    put(w2);
    put(b1);
    put(b2);
    return theta;
  }

  void assign(const Vector& theta) {
    if (theta.size() != parameter_count())
      throw DimensionError("NetworkParams::assign: parameter vector has wrong length");
    Index o = 0;
    auto get = [&](auto& m) {
      Eigen::Map<Vector>(m.data(), m.size()) = theta.segment(o, m.size());
      o += m.size();
    };
    get(w1);
    get(w2);
    get(b1);
    get(b2);
  }

  friend bool operator==(const NetworkParams& a, const NetworkParams& b) {
    return a.scale == b.scale && a.w1 == b.w1 && a.w2 == b.w2 && a.b1 == b.b1 && a.b2 == b.b2;
  }
};

struct GradientSet {
  Matrix dw1;
  Matrix dw2;
  Vector db1;
  Vector db2;

  static GradientSet zeros(Index dims, Index bits) {
    return {Matrix::Zero(bits, dims), Matrix::Zero(dims, bits), Vector::Zero(bits),
            Vector::Zero(dims)};
  }

  Vector to_vector() const {
    Vector g(dw1.size() + dw2.size() + db1.size() + db2.size());
    g << Eigen::Map<const Vector>(dw1.data(), dw1.size()),
        Eigen::Map<const Vector>(dw2.data(), dw2.size()), db1, db2;
    return g;
  }
};

struct ForwardCache {
  Vector y;
  Vector z;
};

inline ForwardCache forward(const NetworkParams& p, const Vector& x) {
  if (x.size() != p.dims()) throw DimensionError("forward: input has wrong dimension");
  if (!x.allFinite()) throw DegenerateError("forward: non-finite input");
  ForwardCache c;
  c.y = (p.w1 * x + p.b1).array().tanh().matrix();
  c.z = (p.w2 * c.y + p.b2).array().tanh().matrix();
  return c;
}

namespace detail {

// M = diag(1 - y^2) W2^T diag(1 - z^2); the Jacobian is W1^T M.
inline Matrix jacobian_core(const NetworkParams& p, const Vector& u, const Vector& v) {
  return u.asDiagonal() * p.w2.transpose() * v.asDiagonal();
}

}  // namespace detail

/// Input-to-output Jacobian, J(i, j) = d z_j / d x_i.
inline Matrix jacobian(const NetworkParams& p, const Vector& x) {
  const auto c = forward(p, x);
  const Vector u = (1.0 - c.y.array().square()).matrix();
  const Vector v = (1.0 - c.z.array().square()).matrix();
  return p.w1.transpose() * detail::jacobian_core(p, u, v);
}

/// Per-point Jacobian targets. Either orthonormal tangent bases T_i (target
/// T_i T_i^T, formed on the fly) or explicit D x D target matrices.
class JacobianTargets {
 public:
  enum class Kind { tangent_basis, dense };

  JacobianTargets() = default;

  static JacobianTargets from_bases(std::vector<Matrix> bases) {
    return JacobianTargets(Kind::tangent_basis, std::move(bases));
  }
  static JacobianTargets from_tangents(const std::vector<TangentBasis>& tangents) {
    std::vector<Matrix> b;
    b.reserve(tangents.size());
    for (const auto& t : tangents) b.push_back(t.basis);
    return from_bases(std::move(b));
  }
  static JacobianTargets from_dense(std::vector<Matrix> targets) {
    return JacobianTargets(Kind::dense, std::move(targets));
  }

  /// Subset in the given order; used to build mini-batch targets.
  JacobianTargets select(std::span<const Index> idx) const {
    std::vector<Matrix> out;
    out.reserve(idx.size());
    for (Index i : idx) out.push_back(mats_.at(static_cast<std::size_t>(i)));
    return JacobianTargets(kind_, std::move(out));
  }

  std::size_t size() const { return mats_.size(); }
  Kind kind() const { return kind_; }

  Matrix target(std::size_t i) const {
    const Matrix& m = mats_.at(i);
    return kind_ == Kind::tangent_basis ? Matrix(m * m.transpose()) : m;
  }

 private:
  JacobianTargets(Kind k, std::vector<Matrix> m) : kind_(k), mats_(std::move(m)) {}
  Kind kind_ = Kind::dense;
  std::vector<Matrix> mats_;
};

inline constexpr double kDefaultEpsilon = 1e-4;
inline constexpr double kDefaultAlpha = 0.1;

struct ObjectiveConfig {
  double alpha = kDefaultAlpha;
  double epsilon = kDefaultEpsilon;
};

/// Multipliers on each objective part; 0 switches a part off. Used to check
/// the gradient of each term in isolation.
struct TermWeights {
  double recon = 1.0;
  double jacobian = 1.0;
  double binary = 1.0;
};

struct LossSpec {
  double alpha = kDefaultAlpha;
  double epsilon = kDefaultEpsilon;
  bool tangent_term = true;
  double contractive = 0.0;  // lambda_c on ||dy/dx||_F^2
  TermWeights weights{};
};

/// The jacobian slot holds ||J - A||_F^2 for the tangent term and, for the
/// contractive model, lambda_c * ||dy/dx||_F^2.
struct ObjectiveParts {
  double recon = 0.0;
  double jacobian = 0.0;
  double binary = 0.0;

  double total() const { return recon + jacobian + binary; }
};

struct Evaluation {
  ObjectiveParts parts;
  GradientSet grad;
};

/// Smoothed 1-norm sum_jk sqrt(M_jk^2 + eps).
inline double smooth_l1(const Matrix& m, double eps) {
  return (m.array().square() + eps).sqrt().sum();
}

/// Evaluates the objective (and optionally its gradient) on a batch.
/// `inputs` is what the network sees, `targets` what it must reconstruct;
/// they differ only for the denoising model.
inline Evaluation evaluate_loss(const NetworkParams& p, const DataMatrix& inputs,
                                const DataMatrix& targets, const JacobianTargets* tangents,
                                const LossSpec& spec, bool want_gradient) {
  const Index D = p.dims();
  const Index d = p.bits();
  const Index n = inputs.cols();
  if (inputs.rows() != D || targets.rows() != D || targets.cols() != n)
    throw DimensionError("objective: batch shape does not match the network");
  if (!(spec.epsilon > 0.0)) throw DimensionError("objective: epsilon must be positive");
  const bool use_tangent = spec.tangent_term && spec.weights.jacobian != 0.0;
  if (use_tangent && (tangents == nullptr || tangents->size() != static_cast<std::size_t>(n)))
    throw DimensionError("objective: need one Jacobian target per batch point");

  Evaluation ev;
  if (want_gradient) ev.grad = GradientSet::zeros(D, d);

  const Matrix Y = ((p.w1 * inputs).colwise() + p.b1).array().tanh().matrix();
  const Matrix Z = ((p.w2 * Y).colwise() + p.b2).array().tanh().matrix();
  const Matrix U = (1.0 - Y.array().square()).matrix();  // tanh' at hidden layer
  const Matrix V = (1.0 - Z.array().square()).matrix();  // tanh' at output layer

  Matrix dY, dZ;
  if (want_gradient) {
    dY = Matrix::Zero(d, n);
    dZ = Matrix::Zero(D, n);
  }

  // Reconstruction.
  if (spec.weights.recon != 0.0) {
    const Matrix r = Z - targets;
    ev.parts.recon = spec.weights.recon * r.squaredNorm();
    if (want_gradient) dZ += (2.0 * spec.weights.recon) * r;
  }

  // Binary constraint on the hidden codes.
  const double wb = spec.weights.binary * spec.alpha;
  if (wb != 0.0) {
    Matrix b = Y * Y.transpose();
    b.diagonal().array() -= static_cast<double>(n);
    const Matrix root = (b.array().square() + spec.epsilon).sqrt().matrix();
    ev.parts.binary = wb * root.sum();
    if (want_gradient) {
      const Matrix s = (b.array() / root.array()).matrix();
      dY += (2.0 * wb) * (s * Y);
    }
  }

  // Contractive penalty on the input-to-hidden Jacobian.
  if (spec.contractive != 0.0 && spec.weights.jacobian != 0.0) {
    const double lam = spec.weights.jacobian * spec.contractive;
    const Vector row_sq = p.w1.rowwise().squaredNorm();
    const Matrix U2 = U.array().square().matrix();
    ev.parts.jacobian += lam * (row_sq.transpose() * U2).sum();
    if (want_gradient) {
      ev.grad.dw1 += (2.0 * lam) * (U2.rowwise().sum().asDiagonal() * p.w1);
      // d/dy of u^2 with u = 1 - y^2 is -4 y u.
      dY += (-4.0 * lam) * (Y.array() * U.array()).matrix().cwiseProduct(
                               row_sq.replicate(1, n));
    }
  }

  // Tangent term ||J_i - A_i||_F^2, per point.
  if (use_tangent) {
    const double wj = spec.weights.jacobian;
    const ChunkPlan plan{static_cast<std::size_t>(n), 32};
    struct Partial {
      double value = 0.0;
      Matrix dw1, dw2;
    };
    std::vector<Partial> partial(plan.count());
    const Matrix w2t = p.w2.transpose();
    parallel_chunks(plan.count(), [&](std::size_t c) {
      Partial& acc = partial[c];
      if (want_gradient) {
        acc.dw1 = Matrix::Zero(d, D);
        acc.dw2 = Matrix::Zero(D, d);
      }
      for (std::size_t ii = plan.begin(c); ii < plan.end(c); ++ii) {
        const auto i = static_cast<Index>(ii);
        const Matrix m = U.col(i).asDiagonal() * w2t * V.col(i).asDiagonal();
        Matrix e = p.w1.transpose() * m;
        e -= tangents->target(ii);
        acc.value += wj * e.squaredNorm();
        if (!want_gradient) continue;
        const Matrix g = (2.0 * wj) * e;          // dL/dJ
        acc.dw1.noalias() += m * g.transpose();   // through W1^T
        const Matrix pm = p.w1 * g;               // dL/dM, d x D
        const Matrix q = pm.cwiseProduct(w2t);    // P(k,j) W2(j,k)
        acc.dw2.noalias() +=
            (pm.array() * (U.col(i) * V.col(i).transpose()).array()).matrix().transpose();
        const Vector du = q * V.col(i);
        const Vector dv = q.transpose() * U.col(i);
        dY.col(i) += (-2.0 * Y.col(i).array() * du.array()).matrix();
        dZ.col(i) += (-2.0 * Z.col(i).array() * dv.array()).matrix();
      }
    });
    for (const auto& acc : partial) {
      ev.parts.jacobian += acc.value;
      if (want_gradient) {
        ev.grad.dw1 += acc.dw1;
        ev.grad.dw2 += acc.dw2;
      }
    }
  }

  if (!want_gradient) return ev;

  // Backpropagate the accumulated output/hidden sensitivities.
  const Matrix dc = dZ.cwiseProduct(V);
  ev.grad.db2 += dc.rowwise().sum();
  ev.grad.dw2.noalias() += dc * Y.transpose();
  dY.noalias() += p.w2.transpose() * dc;
  const Matrix da = dY.cwiseProduct(U);
  ev.grad.db1 += da.rowwise().sum();
  ev.grad.dw1.noalias() += da * inputs.transpose();
  return ev;
}

inline LossSpec jacobin_spec(const ObjectiveConfig& cfg) {
  LossSpec s;
  s.alpha = cfg.alpha;
  s.epsilon = cfg.epsilon;
  return s;
}

/// Auto-JacoBin objective on a batch; tangents holds one target per column.
inline ObjectiveParts objective(const NetworkParams& p, const DataMatrix& batch,
                                const JacobianTargets& tangents, const ObjectiveConfig& cfg) {
  return evaluate_loss(p, batch, batch, &tangents, jacobin_spec(cfg), false).parts;
}

inline GradientSet gradients(const NetworkParams& p, const DataMatrix& batch,
                             const JacobianTargets& tangents, const ObjectiveConfig& cfg) {
  return evaluate_loss(p, batch, batch, &tangents, jacobin_spec(cfg), true).grad;
}

struct GradCheckReport {
  double w1 = 0.0;
  double w2 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;

  double max() const { return std::max({w1, w2, b1, b2}); }
};

/// Compares an analytic gradient with central finite differences of `value`
/// at p. Each block's error is max |analytic - fd| / max(1, |fd|).
inline GradCheckReport gradient_check(const NetworkParams& p,
                                      const std::function<double(const NetworkParams&)>& value,
                                      const GradientSet& analytic, double h) {
  if (!(h > 0.0)) throw DimensionError("gradient_check: step must be positive");
  const Vector theta = p.to_vector();
  const Vector g = analytic.to_vector();
  if (g.size() != theta.size()) throw DimensionError("gradient_check: gradient has wrong size");
  NetworkParams probe = p;
  Vector t = theta;
  Vector err(theta.size());
  for (Index k = 0; k < theta.size(); ++k) {
    t(k) = theta(k) + h;
    probe.assign(t);
    const double fp = value(probe);
    t(k) = theta(k) - h;
    probe.assign(t);
    const double fm = value(probe);
    t(k) = theta(k);
    const double fd = (fp - fm) / (2.0 * h);
    const double e = std::abs(g(k) - fd) / std::max(1.0, std::abs(fd));
    err(k) = std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
  }
  GradCheckReport r;
  const Index n1 = p.w1.size(), n2 = p.w2.size(), n3 = p.b1.size(), n4 = p.b2.size();
  auto block_max = [&](Index off, Index len) {
    return len == 0 ? 0.0 : err.segment(off, len).maxCoeff();
  };
  r.w1 = block_max(0, n1);
  r.w2 = block_max(n1, n2);
  r.b1 = block_max(n1 + n2, n3);
  r.b2 = block_max(n1 + n2 + n3, n4);
  return r;
}

/// Finite-difference check of the Auto-JacoBin gradient; returns the maximum
/// relative error over all parameters.
inline double grad_check(const NetworkParams& p, const DataMatrix& batch,
                         const JacobianTargets& tangents, const ObjectiveConfig& cfg, double h) {
  const auto value = [&](const NetworkParams& q) { return objective(q, batch, tangents, cfg).total(); };
  return gradient_check(p, value, gradients(p, batch, tangents, cfg), h).max();
}

// --- Model file (.ajb) -------------------------------------------------------
//   "AJBN", uint32 version=1, uint32 D, uint32 d, float64 scale, then row-major
//   float64 blocks W1 (d x D), W2 (D x d), b1 (d), b2 (D).

inline constexpr std::uint32_t kModelVersion = 1;

inline std::vector<unsigned char> encode_model(const NetworkParams& p) {
  p.validate();
  detail::ByteWriter w;
  w.put_magic("AJBN");
  w.put(kModelVersion);
  w.put(static_cast<std::uint32_t>(p.dims()));
  w.put(static_cast<std::uint32_t>(p.bits()));
  w.put(p.scale);
  auto put_rows = [&](const Matrix& m) {
    for (Index r = 0; r < m.rows(); ++r)
      for (Index c = 0; c < m.cols(); ++c) w.put(m(r, c));
  };
  put_rows(p.w1);
  put_rows(p.w2);
  for (Index i = 0; i < p.b1.size(); ++i) w.put(p.b1(i));
  for (Index i = 0; i < p.b2.size(); ++i) w.put(p.b2(i));
  return w.bytes();
}

inline void write_model(const std::string& path, const NetworkParams& p) {
  detail::write_file_bytes(path, encode_model(p));
}

inline NetworkParams read_model(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::ByteReader rd(bytes, "model '" + path + "'");
  rd.expect_magic("AJBN");
  const auto version = rd.get<std::uint32_t>();
  if (version != kModelVersion)
    throw FormatError("model: unsupported version " + std::to_string(version));
  const auto D = static_cast<Index>(rd.get<std::uint32_t>());
  const auto d = static_cast<Index>(rd.get<std::uint32_t>());
  if (D == 0 || d == 0) throw FormatError("model: zero dimension");
  NetworkParams p = NetworkParams::zeros(D, d);
  p.scale = rd.get<double>();
  auto get_rows = [&](Matrix& m) {
    for (Index r = 0; r < m.rows(); ++r)
      for (Index c = 0; c < m.cols(); ++c) m(r, c) = rd.get<double>();
  };
  get_rows(p.w1);
  get_rows(p.w2);
  for (Index i = 0; i < d; ++i) p.b1(i) = rd.get<double>();
  for (Index i = 0; i < D; ++i) p.b2(i) = rd.get<double>();
  if (!rd.done()) throw FormatError("model: trailing bytes");
  p.validate();
  return p;
}

}  // namespace ajb
