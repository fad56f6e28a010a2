#include "txlr/kernels.hpp"

namespace txlr::reference {

void lift(const LiftShape &s, std::span<const cplx> kspace, std::span<cplx> hankel) {
  const Index n1 = s.n1();
  const Index n2 = s.n2();
  for (Index c = 0; c < s.channels(); ++c) {
    const cplx *src = kspace.data() + c * s.nkx * s.nky;
    cplx *dst = hankel.data() + c * n1 * n2;
    for (Index q = 0; q < s.py(); ++q) {
      for (Index p = 0; p < s.px(); ++p) {
        const Index j = p + s.px() * q;
        for (Index b = 0; b < s.kernel.n; ++b) {
          for (Index a = 0; a < s.kernel.m; ++a) {
            dst[(a + s.kernel.m * b) + n1 * j] = src[(p + a) + s.nkx * (q + b)];
          }
        }
      }
    }
  }
}

void lift_adjoint(const LiftShape &s, std::span<const cplx> hankel, std::span<cplx> kspace, bool accumulate) {
  if (!accumulate) std::fill(kspace.begin(), kspace.end(), cplx{});
  const Index n1 = s.n1();
  const Index n2 = s.n2();
  for (Index c = 0; c < s.channels(); ++c) {
    const cplx *src = hankel.data() + c * n1 * n2;
    cplx *dst = kspace.data() + c * s.nkx * s.nky;
    for (Index q = 0; q < s.py(); ++q) {
      for (Index p = 0; p < s.px(); ++p) {
        const Index j = p + s.px() * q;
        for (Index b = 0; b < s.kernel.n; ++b) {
          for (Index a = 0; a < s.kernel.m; ++a) {
            dst[(p + a) + s.nkx * (q + b)] += src[(a + s.kernel.m * b) + n1 * j];
          }
        }
      }
    }
  }
}

namespace {

// (row, col) of H(i, j, rx, tx) in unfolding u.
std::pair<Index, Index> position(Unfolding u, const LiftShape &s, Index i, Index j, Index rx, Index tx) {
  switch (u) {
    case Unfolding::Vc:
      return {i + s.n1() * (rx + s.nrx * tx), j};
    case Unfolding::Tc:
      return {i + s.n1() * tx, j + s.n2() * rx};
    case Unfolding::Rc:
      break;
  }
  return {i + s.n1() * rx, j + s.n2() * tx};
}

}  // namespace

void unfold(Unfolding u, const LiftShape &s, std::span<const cplx> hankel, Matrix &out) {
  out.resize(unfolded_rows(u, s), unfolded_cols(u, s));
  std::size_t k = 0;
  for (Index tx = 0; tx < s.ntx; ++tx)
    for (Index rx = 0; rx < s.nrx; ++rx)
      for (Index j = 0; j < s.n2(); ++j)
        for (Index i = 0; i < s.n1(); ++i) {
          const auto [r, c] = position(u, s, i, j, rx, tx);
          out(r, c) = hankel[k++];
        }
}

void refold(Unfolding u, const LiftShape &s, const Matrix &in, std::span<cplx> hankel) {
  std::size_t k = 0;
  for (Index tx = 0; tx < s.ntx; ++tx)
    for (Index rx = 0; rx < s.nrx; ++rx)
      for (Index j = 0; j < s.n2(); ++j)
        for (Index i = 0; i < s.n1(); ++i) {
          const auto [r, c] = position(u, s, i, j, rx, tx);
          hankel[k++] = in(r, c);
        }
}

void combine(const LiftShape &s, std::span<const cplx> data, MaskView mask, std::span<const int> multiplicity,
             std::span<const cplx> consensus, double rho, int nconstraints, std::span<cplx> z) {
  const Index plane = s.nkx * s.nky;
  for (Index tx = 0; tx < s.ntx; ++tx) {
    for (Index rx = 0; rx < s.nrx; ++rx) {
      for (Index k = 0; k < plane; ++k) {
        const Index e = k + plane * (rx + s.nrx * tx);
        const double m = mask.sampled(k, plane, tx) ? 1.0 : 0.0;
        z[e] = (m * data[e] + rho * consensus[e]) / (m + nconstraints * rho * multiplicity[k]);
      }
    }
  }
}

}  // namespace txlr::reference
