#include "txlr/metrics.hpp"

#include <random>

#include "txlr/hankel.hpp"
#include "txlr/svt.hpp"

namespace txlr {

double rmse(const KSpaceTensor &z_hat, const KSpaceTensor &z_true) {
  if (z_hat.dims() != z_true.dims()) {
    throw DimensionError("rmse: " + to_string(z_hat.dims()) + " vs " + to_string(z_true.dims()));
  }
  const double ref = z_true.norm();
  if (!(ref > 0.0)) throw MetricError("rmse: ground truth is zero");
  double acc = 0.0;
  const auto a = z_hat.values();
  const auto b = z_true.values();
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
  return std::sqrt(acc) / ref;
}

SingularSpectrum singular_spectrum(const KSpaceTensor &d, const Kernel &kernel, Unfolding u) {
  const Matrix m = unfold(u, hankel_transform(d, kernel));
  return {singular_values(m), u, m.rows(), m.cols()};
}

SingularSpectrum random_baseline_spectrum(const KSpaceTensor &d, const Kernel &kernel, Unfolding u,
                                          std::uint64_t seed) {
  KSpaceTensor noise(d.dims());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (cplx &v : noise.values()) v = {gauss(rng), gauss(rng)};
  const double scale = noise.norm() > 0.0 ? d.norm() / noise.norm() : 0.0;
  noise *= scale;
  return singular_spectrum(noise, kernel, u);
}

RelativeTxMaps relative_tx_maps(const KSpaceTensor &z, double threshold) {
  const auto &dims = z.dims();
  const ImageStack img = to_images(z);
  const Index nx = dims.nkx;
  const Index ny = dims.nky;

  std::vector<ComplexImage> s(static_cast<std::size_t>(dims.ntx), ComplexImage::Zero(nx, ny));
  for (Index rx = 0; rx < dims.nrx; ++rx) {
    ComplexImage ref = ComplexImage::Zero(nx, ny);
    for (Index tx = 0; tx < dims.ntx; ++tx) ref += Eigen::Map<const ComplexImage>(img.channel(rx, tx).data(), nx, ny);
    for (Index tx = 0; tx < dims.ntx; ++tx) {
      s[static_cast<std::size_t>(tx)] +=
          Eigen::Map<const ComplexImage>(img.channel(rx, tx).data(), nx, ny).cwiseProduct(ref.conjugate());
    }
  }
  Eigen::MatrixXd rss = Eigen::MatrixXd::Zero(nx, ny);
  for (const auto &m : s) rss += m.cwiseAbs2();
  rss = rss.cwiseSqrt();

  RelativeTxMaps out;
  out.support = (rss.array() >= threshold * rss.maxCoeff()).matrix();
  if (rss.maxCoeff() == 0.0) out.support.setConstant(false);
  for (const auto &m : s) {
    ComplexImage b = ComplexImage::Zero(nx, ny);
    for (Index y = 0; y < ny; ++y)
      for (Index x = 0; x < nx; ++x)
        if (out.support(x, y)) b(x, y) = m(x, y) / rss(x, y);
    out.maps.push_back(std::move(b));
  }
  return out;
}

RelativeTxMaps relative_tx_maps(const SensitivitySet &sens,
                                const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> &support) {
  if (sens.tx_maps.empty()) throw DimensionError("no transmit maps");
  const Index nx = sens.tx_maps.front().rows();
  const Index ny = sens.tx_maps.front().cols();
  if (support.rows() != nx || support.cols() != ny) throw DimensionError("support and map sizes differ");
  ComplexImage sum = ComplexImage::Zero(nx, ny);
  Eigen::MatrixXd energy = Eigen::MatrixXd::Zero(nx, ny);
  for (const auto &t : sens.tx_maps) {
    sum += t;
    energy += t.cwiseAbs2();
  }
  RelativeTxMaps out;
  out.support = support;
  for (const auto &t : sens.tx_maps) {
    ComplexImage b = ComplexImage::Zero(nx, ny);
    for (Index y = 0; y < ny; ++y)
      for (Index x = 0; x < nx; ++x) {
        const double mag = std::abs(sum(x, y));
        if (!support(x, y) || mag == 0.0 || energy(x, y) == 0.0) continue;
        b(x, y) = t(x, y) * std::conj(sum(x, y)) / mag / std::sqrt(energy(x, y));
      }
    out.maps.push_back(std::move(b));
  }
  return out;
}

double map_rmse(const RelativeTxMaps &m_hat, const RelativeTxMaps &m_true) {
  if (m_hat.maps.size() != m_true.maps.size() || m_hat.support.rows() != m_true.support.rows() ||
      m_hat.support.cols() != m_true.support.cols()) {
    throw DimensionError("map_rmse: map sets differ in shape");
  }
  double err = 0.0;
  double ref = 0.0;
  Index count = 0;
  for (Index y = 0; y < m_hat.support.cols(); ++y) {
    for (Index x = 0; x < m_hat.support.rows(); ++x) {
      if (!m_hat.support(x, y) || !m_true.support(x, y)) continue;
      ++count;
      for (std::size_t t = 0; t < m_hat.maps.size(); ++t) {
        err += std::norm(m_hat.maps[t](x, y) - m_true.maps[t](x, y));
        ref += std::norm(m_true.maps[t](x, y));
      }
    }
  }
  if (count == 0) throw MetricError("map_rmse: maps share no support");
  if (!(ref > 0.0)) throw MetricError("map_rmse: reference maps are zero on the support");
  return std::sqrt(err / ref);
}

}  // namespace txlr
