#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "txlr/phantom.hpp"
#include "txlr/tensor.hpp"
#include "txlr/unfold.hpp"

namespace txlr {

/// ||z_hat - z|| / ||z|| over the vectorised tensors. Throws MetricError for a
/// zero ground truth and DimensionError for mismatched shapes.
double rmse(const KSpaceTensor &z_hat, const KSpaceTensor &z_true);

struct SingularSpectrum {
  Eigen::VectorXd values;  // descending
  Unfolding unfolding;
  Index rows;
  Index cols;
};

/// Singular values of the chosen unfolding of T(d).
SingularSpectrum singular_spectrum(const KSpaceTensor &d, const Kernel &kernel, Unfolding u);

/// Spectrum of the same unfolding built from i.i.d. complex Gaussian k-space of
/// the same dims and Frobenius norm as `d`; the reference curve for judging
/// how low-rank real data is.
SingularSpectrum random_baseline_spectrum(const KSpaceTensor &d, const Kernel &kernel, Unfolding u,
                                          std::uint64_t seed);

/// Relative transmit maps b_tx(x, y) with sum_tx |b_tx|^2 = 1 on `support`.
struct RelativeTxMaps {
  std::vector<ComplexImage> maps;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> support;
};

/// Receive-combined ratio estimate from completed k-space:
///   x_{tx,rx} = idft2_centered(z), ref_rx = sum_tx x_{tx,rx},
///   s_tx = sum_rx x_{tx,rx} conj(ref_rx), b_tx = s_tx / sqrt(sum_tx |s_tx|^2),
/// masked where that root-sum-of-squares falls below threshold * its maximum.
RelativeTxMaps relative_tx_maps(const KSpaceTensor &z, double threshold = 0.1);

/// Generator transmit maps under the same normalisation, restricted to
/// `support`: b_tx = t_tx conj(sum t) / |sum t| / sqrt(sum |t|^2).
RelativeTxMaps relative_tx_maps(const SensitivitySet &sens,
                                const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> &support);

/// Complex RMSE of the maps over the shared support, normalised like rmse().
/// Throws MetricError if the shared support is empty.
double map_rmse(const RelativeTxMaps &m_hat, const RelativeTxMaps &m_true);

}  // namespace txlr
