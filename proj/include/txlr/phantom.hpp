#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "txlr/tensor.hpp"

namespace txlr {

/// Real image indexed (x, y), x varying fastest.
using RealImage = Eigen::MatrixXd;
/// Complex image indexed (x, y).
using ComplexImage = Eigen::MatrixXcd;
/// Image-domain signal per receive/transmit pair. Same layout as the k-space
/// tensor it transforms to.
using ImageStack = KSpaceTensor;

enum class PhantomKind { Disc, SheppLike, BodyEllipses };

PhantomKind parse_phantom_kind(const std::string &text);
std::string to_string(PhantomKind k);

/// Non-negative piecewise-smooth proton density with support strictly inside
/// the field of view. `Disc` is a uniform disc of radius 0.4*FOV; the other
/// kinds jitter their ellipses with `seed`. Requires nx, ny >= 16.
RealImage generate_phantom(Index nx, Index ny, PhantomKind kind, std::uint64_t seed);

/// Smooth complex transmit and receive maps.
struct SensitivitySet {
  std::vector<ComplexImage> tx_maps;
  std::vector<ComplexImage> rx_maps;
  int order = 1;
};

struct SensitivityOptions {
  /// Amplitude falloff per unit of harmonic index (|p| + |q|).
  double decay = 0.5;
  /// Extra magnitude added to the DC coefficient so maps stay away from zero.
  double dc_offset = 1.0;
};

/// Each map is a sum of spatial harmonics exp(2 pi i (p x / nx + q y / ny))
/// with |p|, |q| <= order - 1 and seeded complex Gaussian coefficients, so its
/// DFT is supported on a (2 order - 1)^2 neighbourhood of DC.
SensitivitySet generate_sensitivities(Index nx, Index ny, Index nrx, Index ntx, int order, std::uint64_t seed,
                                      const SensitivityOptions &opts = {});

/// phantom * tx_map * rx_map for every pair, laid out (x, y, rx, tx).
ImageStack image_stack(const RealImage &phantom, const SensitivitySet &sens);

/// D(:, :, rx, tx) = dft2_centered(phantom * tx_map * rx_map).
KSpaceTensor simulate_kspace(const RealImage &phantom, const SensitivitySet &sens);

/// Orthonormal 2-D DFT with DC at (floor(nx/2), floor(ny/2)).
ComplexImage dft2_centered(const ComplexImage &image);
ComplexImage idft2_centered(const ComplexImage &kspace);

/// Per-channel centred DFT / inverse of a whole stack.
KSpaceTensor to_kspace(const ImageStack &images);
ImageStack to_images(const KSpaceTensor &kspace);

/// Central cx x cy region; the DC sample lands at (floor(cx/2), floor(cy/2)).
KSpaceTensor crop_kspace(const KSpaceTensor &d, Index cx, Index cy);

}  // namespace txlr
