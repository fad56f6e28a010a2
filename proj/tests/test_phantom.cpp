#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>

#include <Eigen/Eigenvalues>

#include "test_util.hpp"
#include "txlr/hankel.hpp"
#include "txlr/phantom.hpp"
#include "txlr/svt.hpp"
#include "txlr/unfold.hpp"

using namespace txlr;

namespace {

// Direct evaluation of the centred unitary DFT.
ComplexImage brute_dft(const ComplexImage &img, int sign) {
  const Index nx = img.rows();
  const Index ny = img.cols();
  const double cx = static_cast<double>(nx / 2);
  const double cy = static_cast<double>(ny / 2);
  ComplexImage out = ComplexImage::Zero(nx, ny);
  for (Index v = 0; v < ny; ++v)
    for (Index u = 0; u < nx; ++u) {
      cplx acc{};
      for (Index y = 0; y < ny; ++y)
        for (Index x = 0; x < nx; ++x) {
          const double phase = 2.0 * std::numbers::pi *
                               ((u - cx) * (x - cx) / static_cast<double>(nx) + (v - cy) * (y - cy) / static_cast<double>(ny));
          acc += img(x, y) * std::polar(1.0, sign * phase);
        }
      out(u, v) = acc / std::sqrt(static_cast<double>(nx * ny));
    }
  return out;
}

ComplexImage random_image(Index nx, Index ny, std::uint64_t seed) {
  const Matrix m = test::random_matrix(nx, ny, seed);
  return m;
}

}  // namespace

TEST_CASE("phantom kinds parse and print") {
  for (auto k : {PhantomKind::Disc, PhantomKind::SheppLike, PhantomKind::BodyEllipses})
    CHECK(parse_phantom_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_phantom_kind("brain"), ConfigError);
  CHECK_THROWS_AS(generate_phantom(8, 32, PhantomKind::Disc, 0), DimensionError);
}

TEST_CASE("disc phantom is one inside and zero outside") {
  const RealImage d = generate_phantom(32, 32, PhantomKind::Disc, 0);
  CHECK(d(16, 16) == 1.0);
  CHECK(d(0, 0) == 0.0);
  CHECK(d(31, 16) == 0.0);
  CHECK(d(16 + 12, 16) == 1.0);
  CHECK(d(16 + 13, 16) == 0.0);
  for (double v : d.reshaped()) CHECK((v == 0.0 || v == 1.0));
}

TEST_CASE("phantoms are deterministic and non-negative") {
  for (auto kind : {PhantomKind::SheppLike, PhantomKind::BodyEllipses}) {
    const RealImage a = generate_phantom(48, 40, kind, 5);
    CHECK(a == generate_phantom(48, 40, kind, 5));
    CHECK_FALSE(a == generate_phantom(48, 40, kind, 6));
    CHECK(a.minCoeff() >= 0.0);
    CHECK(a.maxCoeff() > 0.0);
  }
}

TEST_CASE("body phantom support covers a plausible fraction of the field of view") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RealImage p = generate_phantom(64, 64, PhantomKind::BodyEllipses, seed);
    const double frac = (p.array() > 0.05 * p.maxCoeff()).cast<double>().mean();
    CHECK(frac > 0.3);
    CHECK(frac < 0.7);
  }
}

TEST_CASE("order-1 sensitivities are constant") {
  const SensitivitySet s = generate_sensitivities(20, 18, 3, 2, 1, 4);
  REQUIRE(s.tx_maps.size() == 2);
  REQUIRE(s.rx_maps.size() == 3);
  for (const auto *maps : {&s.tx_maps, &s.rx_maps})
    for (const ComplexImage &m : *maps) {
      CHECK(std::abs(m(0, 0)) > 0.0);
      CHECK((m.array() - m(0, 0)).abs().maxCoeff() < 1e-12 * std::abs(m(0, 0)));
    }
  CHECK_THROWS_AS(generate_sensitivities(20, 18, 3, 2, 0, 4), ParameterError);
  CHECK_THROWS_AS(generate_sensitivities(20, 18, 0, 2, 2, 4), ParameterError);
}

TEST_CASE("eight order-3 receive maps are linearly independent") {
  const SensitivitySet s = generate_sensitivities(32, 32, 8, 1, 3, 7);
  Matrix stack(32 * 32, 8);
  for (Index r = 0; r < 8; ++r) stack.col(r) = s.rx_maps[static_cast<std::size_t>(r)].reshaped();
  const Matrix gram = stack.adjoint() * stack;
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Matrix>(gram).eigenvalues();
  CHECK(ev.minCoeff() > 1e-6 * ev.maxCoeff());
}

TEST_CASE("map harmonics are band-limited to the requested order") {
  // A map of order o has nonzero centred DFT samples only within |k| < o of the centre.
  const SensitivitySet s = generate_sensitivities(16, 16, 1, 1, 2, 3);
  const ComplexImage k = dft2_centered(s.tx_maps.front());
  double inside = 0.0;
  double outside = 0.0;
  for (Index y = 0; y < 16; ++y)
    for (Index x = 0; x < 16; ++x)
      (std::abs(x - 8) <= 1 && std::abs(y - 8) <= 1 ? inside : outside) += std::norm(k(x, y));
  CHECK(outside < 1e-24 * inside);
}

TEST_CASE("transmit unfolding of simulated data is numerically low rank") {
  // Order-3 maps on a smooth phantom, 5x5 kernel; the harmonic bound is 81 columns
  // of the Tc unfolding.
  const RealImage p = generate_phantom(32, 32, PhantomKind::Disc, 0);
  const SensitivitySet s = generate_sensitivities(32, 32, 4, 4, 3, 1);
  const KSpaceTensor d = simulate_kspace(p, s);
  const Matrix tc = unfold(Unfolding::Tc, hankel_transform(d, {5, 5}));
  const Eigen::VectorXd sv = singular_values(tc);
  const Index r1 = 81;
  REQUIRE(sv.size() > r1 + 5);
  CHECK(sv(r1 + 5) / sv(0) < 0.05);
}

TEST_CASE("image stack is the phantom times transmit and receive maps") {
  const RealImage p = generate_phantom(16, 16, PhantomKind::SheppLike, 1);
  const SensitivitySet s = generate_sensitivities(16, 16, 2, 3, 2, 2);
  const ImageStack img = image_stack(p, s);
  CHECK(img.dims() == Dims4{16, 16, 2, 3});
  for (Index tx = 0; tx < 3; ++tx)
    for (Index rx = 0; rx < 2; ++rx)
      for (Index y = 0; y < 16; y += 5)
        for (Index x = 0; x < 16; x += 3)
          CHECK(std::abs(img(x, y, rx, tx) - p(x, y) * s.tx_maps[static_cast<std::size_t>(tx)](x, y) *
                                                  s.rx_maps[static_cast<std::size_t>(rx)](x, y)) < 1e-14);
  SensitivitySet bad = s;
  bad.rx_maps[0] = ComplexImage::Zero(15, 16);
  CHECK_THROWS_AS(image_stack(p, bad), DimensionError);
}

TEST_CASE("centred DFT") {
  SUBCASE("constant image maps to a centred delta") {
    const ComplexImage k = dft2_centered(ComplexImage::Constant(8, 6, cplx(2.0, 0.0)));
    CHECK(std::abs(k(4, 3) - std::sqrt(48.0) * 2.0) < 1e-12);
    CHECK(k.cwiseAbs().sum() - k.cwiseAbs()(4, 3) < 1e-12);
  }
  SUBCASE("a centred impulse has a flat spectrum") {
    ComplexImage img = ComplexImage::Zero(10, 10);
    img(5, 5) = 1.0;
    const ComplexImage k = dft2_centered(img);
    CHECK((k.cwiseAbs().array() - 0.1).abs().maxCoeff() < 1e-14);
    CHECK((k.array() - cplx(0.1, 0.0)).abs().maxCoeff() < 1e-14);
  }
  SUBCASE("round trip, linearity and Parseval") {
    const ComplexImage a = random_image(12, 9, 1);
    const ComplexImage b = random_image(12, 9, 2);
    CHECK((idft2_centered(dft2_centered(a)) - a).norm() < 1e-12 * a.norm());
    const cplx c(0.3, -1.2);
    CHECK((dft2_centered(a + c * b) - dft2_centered(a) - c * dft2_centered(b)).norm() < 1e-12 * a.norm());
    CHECK(dft2_centered(a).norm() == doctest::Approx(a.norm()).epsilon(1e-13));
  }
  SUBCASE("matches direct evaluation on even and odd grids") {
    for (auto [nx, ny] : {std::pair<Index, Index>{8, 8}, {7, 6}, {5, 9}}) {
      const ComplexImage a = random_image(nx, ny, 3);
      CHECK((dft2_centered(a) - brute_dft(a, -1)).norm() < 1e-10 * a.norm());
      CHECK((idft2_centered(a) - brute_dft(a, +1)).norm() < 1e-10 * a.norm());
    }
  }
}

TEST_CASE("stack transforms act per channel") {
  const KSpaceTensor t = test::random_tensor(Dims4{8, 6, 2, 3}, 4);
  const KSpaceTensor k = to_kspace(t);
  CHECK(test::rel_diff(to_images(k).values(), t.values()) < 1e-13);
  const Eigen::Map<const ComplexImage> ch(t.channel(1, 2).data(), 8, 6);
  const Eigen::Map<const ComplexImage> kch(k.channel(1, 2).data(), 8, 6);
  CHECK((kch - dft2_centered(ch)).norm() < 1e-13);
}

TEST_CASE("centre crop") {
  const KSpaceTensor d = test::random_tensor(Dims4{48, 48, 2, 2}, 5);
  CHECK(crop_kspace(d, 48, 48) == d);
  const KSpaceTensor c = crop_kspace(d, 24, 24);
  CHECK(c.dims() == Dims4{24, 24, 2, 2});
  for (Index tx = 0; tx < 2; ++tx)
    for (Index rx = 0; rx < 2; ++rx)
      for (Index y = 0; y < 24; ++y)
        for (Index x = 0; x < 24; ++x) CHECK(c(x, y, rx, tx) == d(x + 12, y + 12, rx, tx));
  double prev = d.norm();
  for (Index n = 46; n >= 2; n -= 4) {
    const double cur = crop_kspace(d, n, n).norm();
    CHECK(cur <= prev);
    prev = cur;
  }
  // the k-space centre stays at index n/2
  const RealImage p = generate_phantom(32, 32, PhantomKind::Disc, 0);
  const KSpaceTensor k = simulate_kspace(p, generate_sensitivities(32, 32, 1, 1, 1, 0));
  const KSpaceTensor kc = crop_kspace(k, 16, 16);
  CHECK(kc(8, 8, 0, 0) == k(16, 16, 0, 0));
  CHECK_THROWS_AS(crop_kspace(d, 50, 24), DimensionError);
  CHECK_THROWS_AS(crop_kspace(d, 0, 24), DimensionError);
}
