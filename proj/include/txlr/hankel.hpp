#pragma once

#include "txlr/tensor.hpp"

namespace txlr {

/// Lifts every receive/transmit plane of `d` into an N1 x N2 block-Hankel
/// matrix. Column j holds the m x n patch at raster position j; both the patch
/// positions and the elements inside a patch are ordered kx fastest.
/// Throws DimensionError if the kernel does not fit.
HankelTensor hankel_transform(const KSpaceTensor &d, const Kernel &k);

/// T*: every Hankel entry is added back into its source k-space location.
KSpaceTensor hankel_adjoint(const HankelTensor &h, Index nkx, Index nky);

/// T-dagger: like hankel_adjoint but overlapping entries are averaged, so that
/// hankel_pinv(hankel_transform(d)) == d.
KSpaceTensor hankel_pinv(const HankelTensor &h, Index nkx, Index nky);

MultiplicityMap multiplicity(Index nkx, Index nky, const Kernel &k);

}  // namespace txlr
