#include <algorithm>

#include "txlr/kernels.hpp"

namespace txlr::parallel {

void lift(const LiftShape &s, std::span<const cplx> kspace, std::span<cplx> hankel) {
  const Index n1 = s.n1();
  const Index n2 = s.n2();
  const Index m = s.kernel.m;
  const Index channels = s.channels();
#pragma omp parallel for collapse(2) schedule(static)
  for (Index c = 0; c < channels; ++c) {
    for (Index j = 0; j < n2; ++j) {
      const Index p = j % s.px();
      const Index q = j / s.px();
      const cplx *src = kspace.data() + c * s.nkx * s.nky + p + s.nkx * q;
      cplx *dst = hankel.data() + n1 * (j + n2 * c);
      for (Index b = 0; b < s.kernel.n; ++b) {
        std::copy_n(src + s.nkx * b, m, dst + m * b);
      }
    }
  }
}

void lift_adjoint(const LiftShape &s, std::span<const cplx> hankel, std::span<cplx> kspace, bool accumulate) {
  const Index n1 = s.n1();
  const Index n2 = s.n2();
  const Index plane = s.nkx * s.nky;
  const Index channels = s.channels();
  // One channel per thread; within a channel every patch is added back in
  // place, so no two threads touch the same plane.
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < channels; ++c) {
    cplx *dst = kspace.data() + plane * c;
    if (!accumulate) std::fill(dst, dst + plane, cplx{});
    const cplx *src = hankel.data() + n1 * n2 * c;
    for (Index py = 0; py < s.py(); ++py)
      for (Index px = 0; px < s.px(); ++px, src += n1) {
        const cplx *col = src;
        for (Index b = 0; b < s.kernel.n; ++b) {
          cplx *row = dst + px + s.nkx * (py + b);
          for (Index a = 0; a < s.kernel.m; ++a) row[a] += *col++;
        }
      }
  }
}

namespace {

// Column `col` of an unfolding is a stack of `blocks` contiguous N1-runs of H.
// Returns the H offset of run `b` in column `col`.
inline Index run_offset(Unfolding u, const LiftShape &s, Index col, Index b) {
  const Index n1 = s.n1();
  const Index n2 = s.n2();
  switch (u) {
    case Unfolding::Vc:  // col = j, b = rx + nrx * tx
      return n1 * (col + n2 * b);
    case Unfolding::Tc: {  // col = j + n2 * rx, b = tx
      const Index j = col % n2;
      const Index rx = col / n2;
      return n1 * (j + n2 * (rx + s.nrx * b));
    }
    case Unfolding::Rc:
      break;
  }
  const Index j = col % n2;  // col = j + n2 * tx, b = rx
  const Index tx = col / n2;
  return n1 * (j + n2 * (b + s.nrx * tx));
}

inline Index runs_per_column(Unfolding u, const LiftShape &s) {
  switch (u) {
    case Unfolding::Vc:
      return s.nrx * s.ntx;
    case Unfolding::Tc:
      return s.ntx;
    case Unfolding::Rc:
      break;
  }
  return s.nrx;
}

}  // namespace

void unfold(Unfolding u, const LiftShape &s, std::span<const cplx> hankel, Matrix &out) {
  out.resize(unfolded_rows(u, s), unfolded_cols(u, s));
  const Index n1 = s.n1();
  const Index runs = runs_per_column(u, s);
  const Index cols = out.cols();
#pragma omp parallel for schedule(static)
  for (Index col = 0; col < cols; ++col) {
    cplx *dst = out.data() + out.rows() * col;
    for (Index b = 0; b < runs; ++b) {
      std::copy_n(hankel.data() + run_offset(u, s, col, b), n1, dst + n1 * b);
    }
  }
}

void refold(Unfolding u, const LiftShape &s, const Matrix &in, std::span<cplx> hankel) {
  const Index n1 = s.n1();
  const Index runs = runs_per_column(u, s);
  const Index cols = in.cols();
#pragma omp parallel for schedule(static)
  for (Index col = 0; col < cols; ++col) {
    const cplx *src = in.data() + in.rows() * col;
    for (Index b = 0; b < runs; ++b) {
      std::copy_n(src + n1 * b, n1, hankel.data() + run_offset(u, s, col, b));
    }
  }
}

void combine(const LiftShape &s, std::span<const cplx> data, MaskView mask, std::span<const int> multiplicity,
             std::span<const cplx> consensus, double rho, int nconstraints, std::span<cplx> z) {
  const Index plane = s.nkx * s.nky;
  const Index channels = s.channels();
  const double w = nconstraints * rho;
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < channels; ++c) {
    const Index tx = c / s.nrx;
    const Index base = plane * c;
    for (Index k = 0; k < plane; ++k) {
      const double m = mask.sampled(k, plane, tx) ? 1.0 : 0.0;
      z[base + k] = (m * data[base + k] + rho * consensus[base + k]) / (m + w * multiplicity[k]);
    }
  }
}

}  // namespace txlr::parallel
