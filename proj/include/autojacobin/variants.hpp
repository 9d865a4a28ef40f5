#pragma once

// Comparison models that share the Auto-JacoBin trainer:
//
//   autobin   reconstruction + binary constraint (no Jacobian term)
//   dautobin  autobin fed with masking-corrupted inputs
//   cautobin  autobin + lambda_c * ||dy/dx||_F^2
//   lsh       untrained random Gaussian projection, codes sign(W1 x)

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "autojacobin/errors.hpp"
#include "autojacobin/matrix_io.hpp"
#include "autojacobin/network.hpp"

namespace ajb {

enum class Method { auto_jacobin, autobin, dautobin, cautobin, lsh };

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::auto_jacobin: return "auto-jacobin";
    case Method::autobin: return "autobin";
    case Method::dautobin: return "dautobin";
    case Method::cautobin: return "cautobin";
    case Method::lsh: return "lsh";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
  for (Method m : {Method::auto_jacobin, Method::autobin, Method::dautobin, Method::cautobin,
                   Method::lsh})
    if (method_name(m) == s) return m;
  if (s == "autojacobin") return Method::auto_jacobin;
  return std::nullopt;
}

inline constexpr double kCautobinDefaultAlpha = 0.01;
inline constexpr double kCautobinDefaultLambda = 0.01;
inline constexpr double kDautobinDefaultCorruption = 0.1;

struct VariantConfig {
  Method kind = Method::auto_jacobin;
  double alpha = kDefaultAlpha;
  double epsilon = kDefaultEpsilon;
  double corruption_t = kDautobinDefaultCorruption;  // dautobin
  double lambda_c = kCautobinDefaultLambda;          // cautobin
  std::uint64_t seed = 0;

  /// Defaults per method (alpha = 0.01 for cautobin, 0.1 otherwise).
  static VariantConfig defaults(Method m) {
    VariantConfig c;
    c.kind = m;
    if (m == Method::cautobin) c.alpha = kCautobinDefaultAlpha;
    return c;
  }

  bool needs_tangents() const { return kind == Method::auto_jacobin; }
  bool trains() const { return kind != Method::lsh; }

  void validate() const {
    if (!(alpha >= 0.0)) throw DimensionError("alpha must be non-negative");
    if (!(epsilon > 0.0)) throw DimensionError("epsilon must be positive");
    if (!(corruption_t >= 0.0 && corruption_t <= 1.0))
      throw DimensionError("corruption threshold must lie in [0, 1]");
    if (!(lambda_c >= 0.0)) throw DimensionError("lambda_c must be non-negative");
  }

  LossSpec loss_spec() const {
    LossSpec s;
    s.alpha = alpha;
    s.epsilon = epsilon;
    s.tangent_term = (kind == Method::auto_jacobin);
    s.contractive = (kind == Method::cautobin) ? lambda_c : 0.0;
    return s;
  }
};

inline LossSpec autobin_spec(const ObjectiveConfig& cfg) {
  LossSpec s = jacobin_spec(cfg);
  s.tangent_term = false;
  return s;
}

inline ObjectiveParts autobin_objective(const NetworkParams& p, const DataMatrix& batch,
                                        const ObjectiveConfig& cfg) {
  return evaluate_loss(p, batch, batch, nullptr, autobin_spec(cfg), false).parts;
}

inline GradientSet autobin_gradients(const NetworkParams& p, const DataMatrix& batch,
                                     const ObjectiveConfig& cfg) {
  return evaluate_loss(p, batch, batch, nullptr, autobin_spec(cfg), true).grad;
}

/// Masking noise: each entry is zeroed independently iff its draw r in (0, 1]
/// satisfies r <= t. Drawing from (0, 1] makes t = 0 the identity.
template <class Rng>
Vector corrupt_mask(const Vector& x, double t, Rng& rng) {
  if (!(t >= 0.0 && t <= 1.0)) throw DimensionError("corrupt_mask: t must lie in [0, 1]");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector out = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double r = 1.0 - unit(rng);
    if (r <= t) out(i) = 0.0;
  }
  return out;
}

template <class Rng>
DataMatrix corrupt_columns(const DataMatrix& x, double t, Rng& rng) {
  DataMatrix out(x.rows(), x.cols());
  for (Index j = 0; j < x.cols(); ++j) out.col(j) = corrupt_mask(Vector(x.col(j)), t, rng);
  return out;
}

/// Reconstruct the clean batch from its corrupted version; the binary term
/// uses the hidden codes of the corrupted inputs.
inline ObjectiveParts dautobin_objective(const NetworkParams& p, const DataMatrix& clean,
                                         const DataMatrix& corrupted, const ObjectiveConfig& cfg) {
  return evaluate_loss(p, corrupted, clean, nullptr, autobin_spec(cfg), false).parts;
}

inline GradientSet dautobin_gradients(const NetworkParams& p, const DataMatrix& clean,
                                      const DataMatrix& corrupted, const ObjectiveConfig& cfg) {
  return evaluate_loss(p, corrupted, clean, nullptr, autobin_spec(cfg), true).grad;
}

inline LossSpec cautobin_spec(const ObjectiveConfig& cfg, double lambda_c) {
  if (!(lambda_c >= 0.0)) throw DimensionError("cautobin: lambda_c must be non-negative");
  LossSpec s = autobin_spec(cfg);
  s.contractive = lambda_c;
  return s;
}

inline ObjectiveParts cautobin_objective(const NetworkParams& p, const DataMatrix& batch,
                                         const ObjectiveConfig& cfg, double lambda_c) {
  return evaluate_loss(p, batch, batch, nullptr, cautobin_spec(cfg, lambda_c), false).parts;
}

inline GradientSet cautobin_gradients(const NetworkParams& p, const DataMatrix& batch,
                                      const ObjectiveConfig& cfg, double lambda_c) {
  return evaluate_loss(p, batch, batch, nullptr, cautobin_spec(cfg, lambda_c), true).grad;
}

/// Random-hyperplane hashing: W1 with i.i.d. N(0, 1) entries, everything else
/// zero. Deterministic in the seed.
inline NetworkParams lsh_generate(Index dims, Index bits, std::uint64_t seed) {
  if (bits < 1 || dims < 1) throw DimensionError("lsh_generate: dims and bits must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  NetworkParams p = NetworkParams::zeros(dims, bits);
  for (Index c = 0; c < dims; ++c)
    for (Index r = 0; r < bits; ++r) p.w1(r, c) = gauss(rng);
  return p;
}

}  // namespace ajb
