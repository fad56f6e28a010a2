#pragma once

#include <cstdint>
#include <vector>

#include "txlr/kernels.hpp"
#include "txlr/tensor.hpp"

namespace txlr {

/// Binary sampling pattern over (kx, ky), either shared by all transmit modes
/// (ntx() == 1) or one plane per transmit mode.
class SamplingMask {
 public:
  SamplingMask(Index nkx, Index nky, Index ntx, std::vector<unsigned char> bits, double r_target,
               std::uint64_t seed, std::vector<double> radius = {});

  /// Every location sampled.
  static SamplingMask full(Index nkx, Index nky, Index ntx = 1);

  [[nodiscard]] Index nkx() const { return nkx_; }
  [[nodiscard]] Index nky() const { return nky_; }
  [[nodiscard]] Index ntx() const { return ntx_; }
  [[nodiscard]] bool operator()(Index kx, Index ky, Index tx = 0) const {
    return bits_[static_cast<std::size_t>(kx + nkx_ * (ky + nky_ * (ntx_ == 1 ? 0 : tx)))] != 0;
  }
  [[nodiscard]] std::span<const unsigned char> bits() const { return bits_; }
  [[nodiscard]] MaskView view() const { return {bits_, ntx_}; }

  /// Sampled locations in plane `tx`.
  [[nodiscard]] Index sampled(Index tx) const;
  /// Sampled locations summed over all planes.
  [[nodiscard]] Index sampled_total() const;
  [[nodiscard]] double r_target() const { return r_target_; }
  /// Total locations over sampled locations, over all planes.
  [[nodiscard]] double r_achieved() const;
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  /// Exclusion radius each plane was generated with (empty for hand-built masks).
  [[nodiscard]] const std::vector<double> &radius() const { return radius_; }

  [[nodiscard]] SamplingMask plane(Index tx) const;
  [[nodiscard]] SamplingMask inverted() const;
  /// True if the mask can be applied to a tensor with these dims.
  [[nodiscard]] bool compatible(const Dims4 &d) const;

  bool operator==(const SamplingMask &o) const { return nkx_ == o.nkx_ && nky_ == o.nky_ && ntx_ == o.ntx_ && bits_ == o.bits_; }

 private:
  Index nkx_;
  Index nky_;
  Index ntx_;
  std::vector<unsigned char> bits_;
  double r_target_;
  std::uint64_t seed_;
  std::vector<double> radius_;
};

struct PoissonDiscOptions {
  bool force_center = true;  ///< always sample the DC location (floor(N/2) in each axis)
  double tolerance = 0.05;   ///< allowed |R_achieved - R| / R
};

/// Uniform-density Poisson-disc pattern: dart throwing over the k-space grid
/// in seeded random order with an exclusion radius, stopped once N/R points
/// are placed. The radius is bisected to the largest value for which a full
/// pass still reaches N/R points. Deterministic in `seed`.
/// Throws ParameterError when R is outside [1, Nkx*Nky] or the tolerance
/// cannot be met.
SamplingMask poisson_disc_mask(Index nkx, Index nky, double r, std::uint64_t seed,
                               const PoissonDiscOptions &opts = {});

/// One independent Poisson-disc plane per transmit mode. Plane 0 uses `seed`
/// itself, so ntx == 1 reproduces poisson_disc_mask. With `shared` set, every
/// mode gets the plane-0 pattern (stored once).
SamplingMask mask_variants_per_tx(Index nkx, Index nky, double r, Index ntx, std::uint64_t seed,
                                  const PoissonDiscOptions &opts = {}, bool shared = false);

/// Seed used for transmit plane `tx` of a per-mode mask.
std::uint64_t tx_seed(std::uint64_t seed, Index tx);

/// Zeroes unsampled entries; sampled entries are copied bit for bit.
KSpaceTensor apply_mask(const KSpaceTensor &d, const SamplingMask &m);

/// Per-receive-channel noise standard deviation (total complex std).
struct NoiseModel {
  std::vector<double> sigma;
};

struct NoiseSpec {
  double psnr_db = 60.0;
  std::uint64_t seed = 0;
};

struct NoisyData {
  KSpaceTensor data;
  NoiseModel noise;
};

/// sigma = max|d| / 10^(psnr/20).
double sigma_for_psnr(const KSpaceTensor &d, double psnr_db);

/// Adds circular complex Gaussian noise of total std sigma (sigma/sqrt(2) per
/// real and imaginary part) to every entry. An infinite PSNR returns `d`
/// unchanged with a zero-sigma model.
NoisyData add_noise(const KSpaceTensor &d, const NoiseSpec &spec);

/// Per-channel sample standard deviation sqrt(mean |x - mean|^2). Needs at
/// least 100 samples per channel and a non-zero spread (EstimationError).
NoiseModel estimate_sigma(const std::vector<std::vector<cplx>> &samples_per_channel);

/// Deterministic 64-bit seed mixing (splitmix64 finaliser).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace txlr
