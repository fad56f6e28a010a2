#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "txlr/error.hpp"

namespace txlr {

using Index = std::ptrdiff_t;
using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Extents of a k-space tensor (kx, ky, rx, tx).
struct Dims4 {
  Index nkx = 1;
  Index nky = 1;
  Index nrx = 1;
  Index ntx = 1;

  [[nodiscard]] Index size() const { return nkx * nky * nrx * ntx; }
  [[nodiscard]] Index plane() const { return nkx * nky; }
  [[nodiscard]] Index channels() const { return nrx * ntx; }
  bool operator==(const Dims4 &) const = default;
};

std::string to_string(const Dims4 &d);

/// Convolution-style kernel extent: m samples along kx, n along ky.
struct Kernel {
  Index m = 1;
  Index n = 1;

  [[nodiscard]] Index area() const { return m * n; }
  bool operator==(const Kernel &) const = default;
};

/// Parses "MxN" (or a single "M" for a square kernel).
Kernel parse_kernel(const std::string &text);
std::string to_string(const Kernel &k);

/// Complex 4-D k-space data D(kx, ky, rx, tx), kx varying fastest.
class KSpaceTensor {
 public:
  KSpaceTensor() = default;
  explicit KSpaceTensor(Dims4 dims);
  KSpaceTensor(Dims4 dims, std::vector<cplx> values);

  [[nodiscard]] const Dims4 &dims() const { return dims_; }
  [[nodiscard]] Index size() const { return static_cast<Index>(data_.size()); }

  cplx &operator()(Index kx, Index ky, Index rx, Index tx) {
    return data_[static_cast<std::size_t>(offset(kx, ky, rx, tx))];
  }
  const cplx &operator()(Index kx, Index ky, Index rx, Index tx) const {
    return data_[static_cast<std::size_t>(offset(kx, ky, rx, tx))];
  }

  [[nodiscard]] std::span<cplx> values() { return data_; }
  [[nodiscard]] std::span<const cplx> values() const { return data_; }

  /// Contiguous Nkx*Nky plane of one receive/transmit pair.
  [[nodiscard]] std::span<cplx> channel(Index rx, Index tx);
  [[nodiscard]] std::span<const cplx> channel(Index rx, Index tx) const;

  [[nodiscard]] double norm() const;
  [[nodiscard]] double squared_norm() const;

  KSpaceTensor &operator+=(const KSpaceTensor &other);
  KSpaceTensor &operator-=(const KSpaceTensor &other);
  KSpaceTensor &operator*=(cplx scale);

  friend KSpaceTensor operator+(KSpaceTensor a, const KSpaceTensor &b) { return a += b; }
  friend KSpaceTensor operator-(KSpaceTensor a, const KSpaceTensor &b) { return a -= b; }
  friend KSpaceTensor operator*(cplx s, KSpaceTensor a) { return a *= s; }

  bool operator==(const KSpaceTensor &) const = default;

 private:
  [[nodiscard]] Index offset(Index kx, Index ky, Index rx, Index tx) const {
    return kx + dims_.nkx * (ky + dims_.nky * (rx + dims_.nrx * tx));
  }

  Dims4 dims_{};
  std::vector<cplx> data_;
};

/// Standard complex inner product <a, b> = sum conj(a) * b.
cplx inner(std::span<const cplx> a, std::span<const cplx> b);

/// Lifted tensor H(i, j, rx, tx) with block-Hankel frontal slices. i runs over
/// the kernel area N1, j over the N2 kernel placements.
class HankelTensor {
 public:
  HankelTensor() = default;
  HankelTensor(Index nkx, Index nky, Kernel kernel, Index nrx, Index ntx);

  [[nodiscard]] Index n1() const { return kernel_.area(); }
  [[nodiscard]] Index n2() const { return (nkx_ - kernel_.m + 1) * (nky_ - kernel_.n + 1); }
  [[nodiscard]] Index nrx() const { return nrx_; }
  [[nodiscard]] Index ntx() const { return ntx_; }
  [[nodiscard]] Index nkx() const { return nkx_; }
  [[nodiscard]] Index nky() const { return nky_; }
  [[nodiscard]] const Kernel &kernel() const { return kernel_; }
  [[nodiscard]] Index size() const { return static_cast<Index>(data_.size()); }

  cplx &operator()(Index i, Index j, Index rx, Index tx) {
    return data_[static_cast<std::size_t>(i + n1() * (j + n2() * (rx + nrx_ * tx)))];
  }
  const cplx &operator()(Index i, Index j, Index rx, Index tx) const {
    return data_[static_cast<std::size_t>(i + n1() * (j + n2() * (rx + nrx_ * tx)))];
  }

  [[nodiscard]] std::span<cplx> values() { return data_; }
  [[nodiscard]] std::span<const cplx> values() const { return data_; }

  /// Frontal slice (N1 x N2) of one receive/transmit pair.
  [[nodiscard]] Eigen::Map<const Matrix> slice(Index rx, Index tx) const;

  /// Same lifted data with the receive and transmit axes exchanged.
  [[nodiscard]] HankelTensor swap_rx_tx() const;

  [[nodiscard]] bool same_shape(const HankelTensor &other) const;

 private:
  Index nkx_ = 1;
  Index nky_ = 1;
  Kernel kernel_{};
  Index nrx_ = 1;
  Index ntx_ = 1;
  std::vector<cplx> data_;
};

/// Number of kernel placements covering each k-space location; the diagonal
/// of T*T.
class MultiplicityMap {
 public:
  MultiplicityMap(Index nkx, Index nky, std::vector<int> counts);

  [[nodiscard]] Index nkx() const { return nkx_; }
  [[nodiscard]] Index nky() const { return nky_; }
  [[nodiscard]] int operator()(Index kx, Index ky) const {
    return counts_[static_cast<std::size_t>(kx + nkx_ * ky)];
  }
  [[nodiscard]] std::span<const int> counts() const { return counts_; }

 private:
  Index nkx_;
  Index nky_;
  std::vector<int> counts_;
};

}  // namespace txlr
