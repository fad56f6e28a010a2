#include "txlr/hankel.hpp"

#include "txlr/kernels.hpp"

namespace txlr {

namespace {

void check_fit(Index nkx, Index nky, const Kernel &k) {
  if (k.m < 1 || k.n < 1 || k.m > nkx || k.n > nky) {
    throw DimensionError("kernel " + to_string(k) + " does not fit k-space " + std::to_string(nkx) + "x" +
                         std::to_string(nky));
  }
}

void check_target(const HankelTensor &h, Index nkx, Index nky) {
  if (h.nkx() != nkx || h.nky() != nky) {
    throw DimensionError("Hankel tensor lifted from " + std::to_string(h.nkx()) + "x" + std::to_string(h.nky()) +
                         " cannot be folded into " + std::to_string(nkx) + "x" + std::to_string(nky));
  }
}

}  // namespace

HankelTensor hankel_transform(const KSpaceTensor &d, const Kernel &k) {
  const auto &dims = d.dims();
  check_fit(dims.nkx, dims.nky, k);
  HankelTensor h(dims.nkx, dims.nky, k, dims.nrx, dims.ntx);
  parallel::lift({dims.nkx, dims.nky, k, dims.nrx, dims.ntx}, d.values(), h.values());
  return h;
}

KSpaceTensor hankel_adjoint(const HankelTensor &h, Index nkx, Index nky) {
  check_target(h, nkx, nky);
  KSpaceTensor out(Dims4{nkx, nky, h.nrx(), h.ntx()});
  parallel::lift_adjoint({nkx, nky, h.kernel(), h.nrx(), h.ntx()}, h.values(), out.values(), false);
  return out;
}

KSpaceTensor hankel_pinv(const HankelTensor &h, Index nkx, Index nky) {
  KSpaceTensor out = hankel_adjoint(h, nkx, nky);
  const MultiplicityMap c = multiplicity(nkx, nky, h.kernel());
  const Index plane = nkx * nky;
  auto values = out.values();
  for (std::size_t e = 0; e < values.size(); ++e) {
    values[e] /= static_cast<double>(c.counts()[e % static_cast<std::size_t>(plane)]);
  }
  return out;
}

MultiplicityMap multiplicity(Index nkx, Index nky, const Kernel &k) {
  check_fit(nkx, nky, k);
  // Closed form: placements covering kx along one axis are
  // min(kx + 1, m, nkx - kx, nkx - m + 1).
  const auto along = [](Index pos, Index extent, Index width) {
    return std::min({pos + 1, width, extent - pos, extent - width + 1});
  };
  std::vector<int> counts(static_cast<std::size_t>(nkx * nky));
  for (Index ky = 0; ky < nky; ++ky) {
    for (Index kx = 0; kx < nkx; ++kx) {
      counts[static_cast<std::size_t>(kx + nkx * ky)] = static_cast<int>(along(kx, nkx, k.m) * along(ky, nky, k.n));
    }
  }
  return {nkx, nky, std::move(counts)};
}

}  // namespace txlr
