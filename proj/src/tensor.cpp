#include "txlr/tensor.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

namespace txlr {

std::string to_string(const Dims4 &d) {
  return std::to_string(d.nkx) + "x" + std::to_string(d.nky) + "x" + std::to_string(d.nrx) + "x" +
         std::to_string(d.ntx);
}

namespace {

Index parse_extent(std::string_view s, const std::string &whole) {
  Index v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v < 1) {
    throw DimensionError("invalid kernel '" + whole + "' (expected MxN with M, N >= 1)");
  }
  return v;
}

void check_dims(const Dims4 &d) {
  if (d.nkx < 1 || d.nky < 1 || d.nrx < 1 || d.ntx < 1) {
    throw DimensionError("k-space dimensions must all be >= 1, got " + to_string(d));
  }
}

}  // namespace

Kernel parse_kernel(const std::string &text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) {
    const Index m = parse_extent(text, text);
    return {m, m};
  }
  return {parse_extent(std::string_view(text).substr(0, x), text),
          parse_extent(std::string_view(text).substr(x + 1), text)};
}

std::string to_string(const Kernel &k) { return std::to_string(k.m) + "x" + std::to_string(k.n); }

KSpaceTensor::KSpaceTensor(Dims4 dims) : dims_(dims) {
  check_dims(dims_);
  data_.assign(static_cast<std::size_t>(dims_.size()), cplx{});
}

KSpaceTensor::KSpaceTensor(Dims4 dims, std::vector<cplx> values) : dims_(dims), data_(std::move(values)) {
  check_dims(dims_);
  if (static_cast<Index>(data_.size()) != dims_.size()) {
    throw DimensionError("k-space tensor " + to_string(dims_) + " needs " + std::to_string(dims_.size()) +
                         " values, got " + std::to_string(data_.size()));
  }
}

std::span<cplx> KSpaceTensor::channel(Index rx, Index tx) {
  return std::span<cplx>(data_).subspan(static_cast<std::size_t>(dims_.plane() * (rx + dims_.nrx * tx)),
                                        static_cast<std::size_t>(dims_.plane()));
}

std::span<const cplx> KSpaceTensor::channel(Index rx, Index tx) const {
  return std::span<const cplx>(data_).subspan(static_cast<std::size_t>(dims_.plane() * (rx + dims_.nrx * tx)),
                                              static_cast<std::size_t>(dims_.plane()));
}

double KSpaceTensor::squared_norm() const {
  return std::accumulate(data_.begin(), data_.end(), 0.0, [](double acc, cplx v) { return acc + std::norm(v); });
}

double KSpaceTensor::norm() const { return std::sqrt(squared_norm()); }

KSpaceTensor &KSpaceTensor::operator+=(const KSpaceTensor &other) {
  if (other.dims_ != dims_) throw DimensionError("tensor sum: " + to_string(dims_) + " vs " + to_string(other.dims_));
  std::transform(data_.begin(), data_.end(), other.data_.begin(), data_.begin(), std::plus<>{});
  return *this;
}

KSpaceTensor &KSpaceTensor::operator-=(const KSpaceTensor &other) {
  if (other.dims_ != dims_) throw DimensionError("tensor difference: " + to_string(dims_) + " vs " + to_string(other.dims_));
  std::transform(data_.begin(), data_.end(), other.data_.begin(), data_.begin(), std::minus<>{});
  return *this;
}

KSpaceTensor &KSpaceTensor::operator*=(cplx scale) {
  for (auto &v : data_) v *= scale;
  return *this;
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw DimensionError("inner product of mismatched lengths");
  cplx acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

HankelTensor::HankelTensor(Index nkx, Index nky, Kernel kernel, Index nrx, Index ntx)
    : nkx_(nkx), nky_(nky), kernel_(kernel), nrx_(nrx), ntx_(ntx) {
  if (kernel.m < 1 || kernel.n < 1) throw DimensionError("kernel extents must be >= 1, got " + to_string(kernel));
  if (kernel.m > nkx || kernel.n > nky) {
    throw DimensionError("kernel " + to_string(kernel) + " larger than k-space " + std::to_string(nkx) + "x" +
                         std::to_string(nky));
  }
  if (nrx < 1 || ntx < 1) throw DimensionError("channel counts must be >= 1");
  data_.assign(static_cast<std::size_t>(n1() * n2() * nrx * ntx), cplx{});
}

Eigen::Map<const Matrix> HankelTensor::slice(Index rx, Index tx) const {
  return {data_.data() + n1() * n2() * (rx + nrx_ * tx), n1(), n2()};
}

HankelTensor HankelTensor::swap_rx_tx() const {
  HankelTensor out(nkx_, nky_, kernel_, ntx_, nrx_);
  const Index block = n1() * n2();
  for (Index tx = 0; tx < ntx_; ++tx) {
    for (Index rx = 0; rx < nrx_; ++rx) {
      std::copy_n(data_.begin() + block * (rx + nrx_ * tx), block, out.data_.begin() + block * (tx + ntx_ * rx));
    }
  }
  return out;
}

bool HankelTensor::same_shape(const HankelTensor &o) const {
  return nkx_ == o.nkx_ && nky_ == o.nky_ && kernel_ == o.kernel_ && nrx_ == o.nrx_ && ntx_ == o.ntx_;
}

MultiplicityMap::MultiplicityMap(Index nkx, Index nky, std::vector<int> counts)
    : nkx_(nkx), nky_(nky), counts_(std::move(counts)) {
  if (static_cast<Index>(counts_.size()) != nkx * nky) throw DimensionError("multiplicity map size mismatch");
}

}  // namespace txlr
