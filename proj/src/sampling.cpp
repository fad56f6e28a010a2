#include "txlr/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace txlr {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t tx_seed(std::uint64_t seed, Index tx) {
  return tx == 0 ? seed : mix_seed(seed, static_cast<std::uint64_t>(tx));
}

SamplingMask::SamplingMask(Index nkx, Index nky, Index ntx, std::vector<unsigned char> bits, double r_target,
                           std::uint64_t seed, std::vector<double> radius)
    : nkx_(nkx), nky_(nky), ntx_(ntx), bits_(std::move(bits)), r_target_(r_target), seed_(seed),
      radius_(std::move(radius)) {
  if (nkx < 1 || nky < 1 || ntx < 1) throw DimensionError("mask extents must be >= 1");
  if (static_cast<Index>(bits_.size()) != nkx * nky * ntx) throw DimensionError("mask bit count mismatch");
}

SamplingMask SamplingMask::full(Index nkx, Index nky, Index ntx) {
  return {nkx, nky, ntx, std::vector<unsigned char>(static_cast<std::size_t>(nkx * nky * ntx), 1), 1.0, 0};
}

Index SamplingMask::sampled(Index tx) const {
  const auto first = bits_.begin() + nkx_ * nky_ * tx;
  return std::count_if(first, first + nkx_ * nky_, [](unsigned char b) { return b != 0; });
}

Index SamplingMask::sampled_total() const {
  return std::count_if(bits_.begin(), bits_.end(), [](unsigned char b) { return b != 0; });
}

double SamplingMask::r_achieved() const {
  const Index n = sampled_total();
  return n == 0 ? std::numeric_limits<double>::infinity() : static_cast<double>(bits_.size()) / static_cast<double>(n);
}

SamplingMask SamplingMask::plane(Index tx) const {
  const Index t = ntx_ == 1 ? 0 : tx;
  const auto first = bits_.begin() + nkx_ * nky_ * t;
  std::vector<double> r;
  if (static_cast<Index>(radius_.size()) > t) r.push_back(radius_[static_cast<std::size_t>(t)]);
  return {nkx_, nky_, 1, std::vector<unsigned char>(first, first + nkx_ * nky_), r_target_, tx_seed(seed_, t), r};
}

SamplingMask SamplingMask::inverted() const {
  std::vector<unsigned char> flipped(bits_.size());
  std::transform(bits_.begin(), bits_.end(), flipped.begin(), [](unsigned char b) -> unsigned char { return b ? 0 : 1; });
  return {nkx_, nky_, ntx_, std::move(flipped), r_target_, seed_};
}

bool SamplingMask::compatible(const Dims4 &d) const {
  return d.nkx == nkx_ && d.nky == nky_ && (ntx_ == 1 || ntx_ == d.ntx);
}

namespace {

// Distinct squared distances realisable on the integer grid (sums of two
// squares), ascending, starting at 1.
std::vector<Index> grid_radii_sq(Index nkx, Index nky) {
  const Index max_sq = (nkx - 1) * (nkx - 1) + (nky - 1) * (nky - 1) + 1;
  std::vector<unsigned char> hit(static_cast<std::size_t>(max_sq + 1), 0);
  for (Index a = 0; a < nkx; ++a)
    for (Index b = 0; b < nky; ++b)
      if (a * a + b * b <= max_sq) hit[static_cast<std::size_t>(a * a + b * b)] = 1;
  hit[static_cast<std::size_t>(max_sq)] = 1;
  std::vector<Index> out;
  for (Index v = 1; v <= max_sq; ++v)
    if (hit[static_cast<std::size_t>(v)]) out.push_back(v);
  return out;
}

class DartThrower {
 public:
  DartThrower(Index nkx, Index nky, std::vector<Index> order) : nkx_(nkx), nky_(nky), order_(std::move(order)) {}

  // Accepts points in order while no accepted point lies at squared distance
  // < radius_sq; stops after `limit` acceptances.
  std::vector<unsigned char> run(Index radius_sq, Index limit, Index *accepted) const {
    std::vector<unsigned char> grid(static_cast<std::size_t>(nkx_ * nky_), 0);
    const auto reach = static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(radius_sq)))) - 1;
    Index count = 0;
    for (const Index p : order_) {
      if (count >= limit) break;
      const Index x = p % nkx_;
      const Index y = p / nkx_;
      bool free = true;
      for (Index dy = -reach; dy <= reach && free; ++dy) {
        const Index yy = y + dy;
        if (yy < 0 || yy >= nky_) continue;
        for (Index dx = -reach; dx <= reach; ++dx) {
          const Index xx = x + dx;
          if (xx < 0 || xx >= nkx_ || dx * dx + dy * dy >= radius_sq) continue;
          if (grid[static_cast<std::size_t>(xx + nkx_ * yy)]) {
            free = false;
            break;
          }
        }
      }
      if (free) {
        grid[static_cast<std::size_t>(p)] = 1;
        ++count;
      }
    }
    *accepted = count;
    return grid;
  }

 private:
  Index nkx_;
  Index nky_;
  std::vector<Index> order_;
};

struct Plane {
  std::vector<unsigned char> bits;
  double radius;
};

Plane poisson_plane(Index nkx, Index nky, double r, std::uint64_t seed, const PoissonDiscOptions &opts) {
  const Index total = nkx * nky;
  if (!(r >= 1.0) || r > static_cast<double>(total)) {
    throw ParameterError("acceleration factor " + std::to_string(r) + " outside [1, " + std::to_string(total) + "]");
  }
  const Index target = std::max<Index>(1, static_cast<Index>(std::llround(static_cast<double>(total) / r)));
  const double achieved = static_cast<double>(total) / static_cast<double>(target);
  if (std::abs(achieved - r) / r > opts.tolerance) {
    throw ParameterError("acceleration factor " + std::to_string(r) + " not reachable on a " + std::to_string(nkx) +
                         "x" + std::to_string(nky) + " grid within tolerance");
  }

  std::vector<Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  if (opts.force_center) {
    const Index center = nkx / 2 + nkx * (nky / 2);
    std::rotate(order.begin(), std::find(order.begin(), order.end(), center),
                std::find(order.begin(), order.end(), center) + 1);
  }
  const DartThrower thrower(nkx, nky, std::move(order));
  const std::vector<Index> radii = grid_radii_sq(nkx, nky);

  // Largest radius whose full pass still places `target` points.
  const auto reaches = [&](Index radius_sq) {
    Index n = 0;
    thrower.run(radius_sq, total, &n);
    return n >= target;
  };
  std::size_t lo = 0;  // radii[0] == 1 excludes nothing, always reaches
  std::size_t hi = radii.size();
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (reaches(radii[mid])) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  while (lo > 0 && !reaches(radii[lo])) --lo;

  Index placed = 0;
  auto bits = thrower.run(radii[lo], target, &placed);
  return {std::move(bits), std::sqrt(static_cast<double>(radii[lo]))};
}

}  // namespace

SamplingMask poisson_disc_mask(Index nkx, Index nky, double r, std::uint64_t seed, const PoissonDiscOptions &opts) {
  return mask_variants_per_tx(nkx, nky, r, 1, seed, opts);
}

SamplingMask mask_variants_per_tx(Index nkx, Index nky, double r, Index ntx, std::uint64_t seed,
                                  const PoissonDiscOptions &opts, bool shared) {
  if (ntx < 1) throw ParameterError("number of transmit modes must be >= 1");
  if (nkx < 1 || nky < 1) throw DimensionError("mask extents must be >= 1");
  const Index planes = shared ? 1 : ntx;
  std::vector<unsigned char> bits;
  std::vector<double> radius;
  bits.reserve(static_cast<std::size_t>(nkx * nky * planes));
  for (Index tx = 0; tx < planes; ++tx) {
    Plane p = poisson_plane(nkx, nky, r, tx_seed(seed, tx), opts);
    bits.insert(bits.end(), p.bits.begin(), p.bits.end());
    radius.push_back(p.radius);
  }
  return {nkx, nky, planes, std::move(bits), r, seed, std::move(radius)};
}

KSpaceTensor apply_mask(const KSpaceTensor &d, const SamplingMask &m) {
  const auto &dims = d.dims();
  if (!m.compatible(dims)) {
    throw DimensionError("mask " + std::to_string(m.nkx()) + "x" + std::to_string(m.nky()) + "x" +
                         std::to_string(m.ntx()) + " does not fit tensor " + to_string(dims));
  }
  KSpaceTensor out(dims);
  for (Index tx = 0; tx < dims.ntx; ++tx)
    for (Index rx = 0; rx < dims.nrx; ++rx)
      for (Index ky = 0; ky < dims.nky; ++ky)
        for (Index kx = 0; kx < dims.nkx; ++kx)
          if (m(kx, ky, tx)) out(kx, ky, rx, tx) = d(kx, ky, rx, tx);
  return out;
}

double sigma_for_psnr(const KSpaceTensor &d, double psnr_db) {
  double peak = 0.0;
  for (const cplx v : d.values()) peak = std::max(peak, std::abs(v));
  return peak / std::pow(10.0, psnr_db / 20.0);
}

NoisyData add_noise(const KSpaceTensor &d, const NoiseSpec &spec) {
  const double sigma = std::isinf(spec.psnr_db) && spec.psnr_db > 0 ? 0.0 : sigma_for_psnr(d, spec.psnr_db);
  NoisyData out{d, NoiseModel{std::vector<double>(static_cast<std::size_t>(d.dims().nrx), sigma)}};
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, sigma / std::sqrt(2.0));
  for (cplx &v : out.data.values()) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v += cplx(re, im);
  }
  return out;
}

NoiseModel estimate_sigma(const std::vector<std::vector<cplx>> &samples_per_channel) {
  NoiseModel model;
  for (std::size_t c = 0; c < samples_per_channel.size(); ++c) {
    const auto &s = samples_per_channel[c];
    if (s.size() < 100) {
      throw EstimationError("channel " + std::to_string(c) + " has " + std::to_string(s.size()) +
                            " noise samples, need at least 100");
    }
    const cplx mean = std::accumulate(s.begin(), s.end(), cplx{}) / static_cast<double>(s.size());
    double acc = 0.0;
    for (const cplx v : s) acc += std::norm(v - mean);
    const double sigma = std::sqrt(acc / static_cast<double>(s.size()));
    if (!(sigma > 0.0)) throw EstimationError("channel " + std::to_string(c) + " noise samples have zero spread");
    model.sigma.push_back(sigma);
  }
  if (model.sigma.empty()) throw EstimationError("no noise channels supplied");
  return model;
}

}  // namespace txlr
