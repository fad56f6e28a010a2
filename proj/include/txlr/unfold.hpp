#pragma once

#include <string>

#include "txlr/kernels.hpp"
#include "txlr/tensor.hpp"

namespace txlr {

/// Shape descriptor needed to refold a matrix back into a HankelTensor.
struct HankelShape {
  Index nkx;
  Index nky;
  Kernel kernel;
  Index nrx;
  Index ntx;

  static HankelShape of(const HankelTensor &h) {
    return {h.nkx(), h.nky(), h.kernel(), h.nrx(), h.ntx()};
  }
  [[nodiscard]] LiftShape lift() const { return {nkx, nky, kernel, nrx, ntx}; }
};

Matrix unfold(Unfolding u, const HankelTensor &h);
HankelTensor refold(Unfolding u, const Matrix &m, const HankelShape &shape);

// Named forms matching the three reconstruction variants.
inline Matrix unfold_vc(const HankelTensor &h) { return unfold(Unfolding::Vc, h); }
inline Matrix unfold_tx(const HankelTensor &h) { return unfold(Unfolding::Tc, h); }
inline Matrix unfold_rx(const HankelTensor &h) { return unfold(Unfolding::Rc, h); }
inline HankelTensor refold_vc(const Matrix &m, const HankelShape &s) { return refold(Unfolding::Vc, m, s); }
inline HankelTensor refold_tx(const Matrix &m, const HankelShape &s) { return refold(Unfolding::Tc, m, s); }
inline HankelTensor refold_rx(const Matrix &m, const HankelShape &s) { return refold(Unfolding::Rc, m, s); }

std::string to_string(Unfolding u);
Unfolding parse_unfolding(const std::string &text);

}  // namespace txlr
