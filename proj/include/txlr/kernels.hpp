#pragma once

// Inner loops of the lifting, unfolding and data-consistency steps.
//
// Two implementations share one signature set:
//   txlr::parallel   OpenMP kernels used by the library,
//   txlr::reference  plain serial loops kept as the test and benchmark baseline.
// Both adjoints scatter every Hankel entry back into its source location; the
// parallel one hands each thread whole channels so no two threads write the
// same element.

#include <span>

#include "txlr/tensor.hpp"

namespace txlr {

enum class Unfolding {
  Vc,  ///< U0: (N1*NRx*NTx) x N2, rx fastest then tx down the rows.
  Tc,  ///< U1: (N1*NTx) x (N2*NRx), tx blocks down, rx blocks across.
  Rc,  ///< U2: (N1*NRx) x (N2*NTx), rx blocks down, tx blocks across.
};

/// Geometry shared by the lifting kernels.
struct LiftShape {
  Index nkx;
  Index nky;
  Kernel kernel;
  Index nrx;
  Index ntx;

  [[nodiscard]] Index px() const { return nkx - kernel.m + 1; }
  [[nodiscard]] Index py() const { return nky - kernel.n + 1; }
  [[nodiscard]] Index n1() const { return kernel.area(); }
  [[nodiscard]] Index n2() const { return px() * py(); }
  [[nodiscard]] Index channels() const { return nrx * ntx; }
};

[[nodiscard]] Index unfolded_rows(Unfolding u, const LiftShape &s);
[[nodiscard]] Index unfolded_cols(Unfolding u, const LiftShape &s);

/// Sampling weights for the data-consistency combine: mask over (kx, ky, t)
/// where t is the transmit index, or 0 for a mask shared by all modes.
struct MaskView {
  std::span<const unsigned char> bits;
  Index ntx = 1;  // 1 or NTx

  [[nodiscard]] bool sampled(Index plane_offset, Index plane, Index tx) const {
    return bits[static_cast<std::size_t>(plane_offset + plane * (ntx == 1 ? 0 : tx))] != 0;
  }
};

#define TXLR_KERNEL_DECLS                                                                   \
  void lift(const LiftShape &s, std::span<const cplx> kspace, std::span<cplx> hankel);      \
  void lift_adjoint(const LiftShape &s, std::span<const cplx> hankel, std::span<cplx> kspace, \
                    bool accumulate);                                                       \
  void unfold(Unfolding u, const LiftShape &s, std::span<const cplx> hankel, Matrix &out);  \
  void refold(Unfolding u, const LiftShape &s, const Matrix &in, std::span<cplx> hankel);   \
  void combine(const LiftShape &s, std::span<const cplx> data, MaskView mask,               \
               std::span<const int> multiplicity, std::span<const cplx> consensus,          \
               double rho, int nconstraints, std::span<cplx> z);

namespace parallel {
TXLR_KERNEL_DECLS
}  // namespace parallel

namespace reference {
TXLR_KERNEL_DECLS
}  // namespace reference

#undef TXLR_KERNEL_DECLS

}  // namespace txlr
