#pragma once

// Dataset ingestion and normalization.
//
// A DataMatrix stores one point per column (D rows x N columns) in double
// precision. File formats keep their native width and are widened on read:
//
//   fvecs: repeated [int32 dim][dim x float32], little-endian
//   bvecs: repeated [int32 dim][dim x uint8]
//   text:  one whitespace-separated vector per line
//
// An empty file yields a 0x0 matrix; the dimension of an empty set is unknown.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "autojacobin/binary_io.hpp"
#include "autojacobin/errors.hpp"

namespace ajb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// D x N, one point per column.
using DataMatrix = Matrix;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw DegenerateError(std::string(what) + ": non-finite entry");
}

namespace detail {

template <class Elem, class Widen>
DataMatrix read_vecs(const std::string& path, const char* fmt, Widen widen) {
  const auto bytes = read_file_bytes(path);
  ByteReader rd(bytes, std::string(fmt) + " '" + path + "'");
  std::vector<double> values;
  std::int64_t dim = -1;
  Index count = 0;
  while (!rd.done()) {
    const auto d = rd.get<std::int32_t>();
    if (d <= 0) throw FormatError(std::string(fmt) + " '" + path + "': non-positive dimension");
    if (dim >= 0 && d != dim)
      throw FormatError(std::string(fmt) + " '" + path + "': inconsistent dimensions " +
                        std::to_string(dim) + " and " + std::to_string(d));
    dim = d;
    for (std::int32_t j = 0; j < d; ++j) values.push_back(widen(rd.get<Elem>()));
    ++count;
  }
  if (count == 0) return DataMatrix(0, 0);
  DataMatrix out = Eigen::Map<const DataMatrix>(values.data(), dim, count);
  require_finite(out, fmt);
  return out;
}

}  // namespace detail

inline DataMatrix read_fvecs(const std::string& path) {
  return detail::read_vecs<float>(path, "fvecs", [](float v) { return static_cast<double>(v); });
}

inline DataMatrix read_bvecs(const std::string& path) {
  return detail::read_vecs<std::uint8_t>(path, "bvecs",
                                         [](std::uint8_t v) { return static_cast<double>(v); });
}

/// Entries are narrowed to float32; the round trip is exact for data that
/// came from an fvecs file.
inline void write_fvecs(const std::string& path, const DataMatrix& x) {
  detail::ByteWriter w;
  for (Index j = 0; j < x.cols(); ++j) {
    w.put(static_cast<std::int32_t>(x.rows()));
    for (Index i = 0; i < x.rows(); ++i) w.put(static_cast<float>(x(i, j)));
  }
  w.save(path);
}

inline void write_bvecs(const std::string& path, const DataMatrix& x) {
  detail::ByteWriter w;
  for (Index j = 0; j < x.cols(); ++j) {
    w.put(static_cast<std::int32_t>(x.rows()));
    for (Index i = 0; i < x.rows(); ++i) {
      const double v = x(i, j);
      if (!(v >= 0.0 && v <= 255.0) || v != std::floor(v))
        throw FormatError("bvecs: entry " + std::to_string(v) + " is not a byte value");
      w.put(static_cast<std::uint8_t>(v));
    }
  }
  w.save(path);
}

inline DataMatrix read_text_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::vector<double> values;
  Index dim = -1;
  Index count = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    Index d = 0;
    std::string tok;
    while (ss >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size())
        throw FormatError("text '" + path + "' line " + std::to_string(line_no) +
                          ": not a number: " + tok);
      values.push_back(v);
      ++d;
    }
    if (d == 0) continue;
    if (dim >= 0 && d != dim)
      throw FormatError("text '" + path + "' line " + std::to_string(line_no) +
                        ": inconsistent dimensions");
    dim = d;
    ++count;
  }
  if (count == 0) return DataMatrix(0, 0);
  DataMatrix out = Eigen::Map<const DataMatrix>(values.data(), dim, count);
  require_finite(out, "text");
  return out;
}

inline void write_text_matrix(const std::string& path, const DataMatrix& x) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.precision(std::numeric_limits<double>::max_digits10);
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) out << (i ? " " : "") << x(i, j);
    out << '\n';
  }
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// Dispatches on extension: .fvecs, .bvecs, anything else is read as text.
inline DataMatrix load_matrix(const std::string& path) {
  if (ends_with(path, ".fvecs")) return read_fvecs(path);
  if (ends_with(path, ".bvecs")) return read_bvecs(path);
  return read_text_matrix(path);
}

inline void save_matrix(const std::string& path, const DataMatrix& x) {
  if (ends_with(path, ".fvecs")) return write_fvecs(path, x);
  if (ends_with(path, ".bvecs")) return write_bvecs(path, x);
  write_text_matrix(path, x);
}

/// Uniform scaling fitted on the training set: s = 0.8 / max_i ||x_i||.
/// The same scale is reused for base and query sets, whose points may then
/// exceed norm 0.8.
struct Normalizer {
  static constexpr double kTargetNorm = 0.8;
  double scale = 1.0;

  DataMatrix apply(const DataMatrix& x) const { return x * scale; }
  DataMatrix unapply(const DataMatrix& x) const { return x / scale; }
};

inline Normalizer fit_normalizer(const DataMatrix& train) {
  if (train.cols() == 0 || train.rows() == 0)
    throw DimensionError("fit_normalizer: empty training matrix");
  const double max_norm = train.colwise().norm().maxCoeff();
  if (!(max_norm > 0.0) || !std::isfinite(max_norm))
    throw DegenerateError("fit_normalizer: maximum column norm is zero");
  const double s = Normalizer::kTargetNorm / max_norm;
  if (!(s > 0.0) || !std::isfinite(s)) throw DegenerateError("fit_normalizer: scale not finite");
  return Normalizer{s};
}

inline DataMatrix apply_normalizer(const Normalizer& nz, const DataMatrix& x, Index expected_dims) {
  if (x.cols() > 0 && x.rows() != expected_dims)
    throw DimensionError("apply_normalizer: expected " + std::to_string(expected_dims) +
                         " dims, got " + std::to_string(x.rows()));
  return nz.apply(x);
}

}  // namespace ajb
