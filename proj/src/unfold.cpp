#include "txlr/unfold.hpp"

namespace txlr {

Index unfolded_rows(Unfolding u, const LiftShape &s) {
  switch (u) {
    case Unfolding::Vc:
      return s.n1() * s.nrx * s.ntx;
    case Unfolding::Tc:
      return s.n1() * s.ntx;
    case Unfolding::Rc:
      break;
  }
  return s.n1() * s.nrx;
}

Index unfolded_cols(Unfolding u, const LiftShape &s) {
  switch (u) {
    case Unfolding::Vc:
      return s.n2();
    case Unfolding::Tc:
      return s.n2() * s.nrx;
    case Unfolding::Rc:
      break;
  }
  return s.n2() * s.ntx;
}

Matrix unfold(Unfolding u, const HankelTensor &h) {
  Matrix out;
  parallel::unfold(u, HankelShape::of(h).lift(), h.values(), out);
  return out;
}

HankelTensor refold(Unfolding u, const Matrix &m, const HankelShape &shape) {
  const LiftShape s = shape.lift();
  HankelTensor h(shape.nkx, shape.nky, shape.kernel, shape.nrx, shape.ntx);
  if (m.rows() != unfolded_rows(u, s) || m.cols() != unfolded_cols(u, s)) {
    throw DimensionError("cannot refold " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + " as " +
                         to_string(u) + " of shape " + std::to_string(unfolded_rows(u, s)) + "x" +
                         std::to_string(unfolded_cols(u, s)));
  }
  parallel::refold(u, s, m, h.values());
  return h;
}

std::string to_string(Unfolding u) {
  switch (u) {
    case Unfolding::Vc:
      return "Vc";
    case Unfolding::Tc:
      return "Tc";
    case Unfolding::Rc:
      break;
  }
  return "Rc";
}

Unfolding parse_unfolding(const std::string &text) {
  if (text == "Vc" || text == "vc" || text == "U0") return Unfolding::Vc;
  if (text == "Tc" || text == "tc" || text == "U1") return Unfolding::Tc;
  if (text == "Rc" || text == "rc" || text == "U2") return Unfolding::Rc;
  throw ConfigError("unknown unfolding '" + text + "' (expected Vc, Tc or Rc)");
}

}  // namespace txlr
