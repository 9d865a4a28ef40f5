#pragma once

// Seeded synthetic datasets for desk-scale experiments.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <cstdint>
#include <random>

#include "autojacobin/errors.hpp"
#include "autojacobin/matrix_io.hpp"
#include "autojacobin/trainer.hpp"

namespace ajb {

/// Uniform samples from {x in R^3 : x1 + x2 + x3 = 1, x_i > 0}.
inline DataMatrix sample_simplex(Index n, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  DataMatrix x(3, n);
  for (Index j = 0; j < n; ++j) {
    const double a = expo(rng), b = expo(rng), c = expo(rng);
    const double s = a + b + c;
    x(0, j) = a / s;
    x(1, j) = b / s;
    x(2, j) = c / s;
  }
  return x;
}

/// Random orthonormal D x r basis.
inline Matrix random_orthonormal(Index dims, Index r, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dims, r);
  for (Index c = 0; c < r; ++c)
    for (Index i = 0; i < dims; ++i) g(i, c) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(dims, r);
}

struct AffineSample {
  DataMatrix points;
  Vector origin;
  Matrix basis;  // D x r
};

/// Points origin + T c with c ~ U[-1, 1]^r, plus isotropic Gaussian noise.
inline AffineSample sample_affine(Index dims, Index r, Index n, double noise, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  AffineSample s;
  s.basis = random_orthonormal(dims, r, rng);
  s.origin.resize(dims);
  for (Index i = 0; i < dims; ++i) s.origin(i) = gauss(rng);
  s.points.resize(dims, n);
  Vector c(r);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < r; ++k) c(k) = unit(rng);
    s.points.col(j) = s.origin + s.basis * c;
    for (Index i = 0; i < dims; ++i) s.points(i, j) += noise * gauss(rng);
  }
  return s;
}

struct ManifoldSpec {
  Index dims = 64;       // ambient dimension
  Index intrinsic = 8;   // latent dimension
  double frequency = 1.5;
  double noise = 0.05;
  std::uint64_t seed = 1;
};

/// Curved manifold: x = Q sin(Omega u + phase) + noise with latent
/// u ~ U[0, 1]^m, random frequencies Omega and random orthogonal Q. The
/// embedding is fixed by spec.seed; the rng passed to sample() drives the latent draws and
/// noise. Centered by the generator's analytic mean so sign codes without a
/// bias are meaningful.
class CurvedManifold {
 public:
  explicit CurvedManifold(const ManifoldSpec& spec) : spec_(spec) {
    if (spec.dims < 1 || spec.intrinsic < 1) throw DimensionError("manifold: bad dimensions");
    Rng rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    omega_.resize(spec.dims, spec.intrinsic);
    for (Index c = 0; c < spec.intrinsic; ++c)
      for (Index r = 0; r < spec.dims; ++r) omega_(r, c) = spec.frequency * gauss(rng);
    phase_.resize(spec.dims);
    for (Index r = 0; r < spec.dims; ++r) phase_(r) = angle(rng);
    rotation_ = random_orthonormal(spec.dims, spec.dims, rng);
    // E[sin(w.u + p)] for u ~ U[0,1]^m is Im(e^{ip} prod_k (e^{i w_k} - 1)/(i w_k)).
    mean_.resize(spec.dims);
    for (Index r = 0; r < spec.dims; ++r) {
      std::complex<double> acc = std::polar(1.0, phase_(r));
      for (Index k = 0; k < spec.intrinsic; ++k) {
        const double w = omega_(r, k);
        acc *= std::abs(w) < 1e-12 ? std::complex<double>(1.0, 0.0)
                                   : (std::polar(1.0, w) - 1.0) / std::complex<double>(0.0, w);
      }
      mean_(r) = acc.imag();
    }
  }

  DataMatrix sample(Index n, Rng& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    DataMatrix x(spec_.dims, n);
    Vector u(spec_.intrinsic);
    for (Index j = 0; j < n; ++j) {
      for (Index k = 0; k < spec_.intrinsic; ++k) u(k) = unit(rng);
      const Vector feat = (omega_ * u + phase_).array().sin().matrix() - mean_;
      x.col(j) = rotation_ * feat;
      for (Index i = 0; i < spec_.dims; ++i) x(i, j) += spec_.noise * gauss(rng);
    }
    return x;
  }

 private:
  ManifoldSpec spec_;
  Matrix omega_;
  Vector phase_;
  Matrix rotation_;
  Vector mean_;
};

}  // namespace ajb
