#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>

#include "test_util.hpp"
#include "txlr/hankel.hpp"
#include "txlr/kernels.hpp"
#include "txlr/unfold.hpp"

using namespace txlr;
using test::random_hankel;
using test::random_tensor;
using test::rel_diff;

namespace {

// a[kx][ky] = 1..9 row by row
KSpaceTensor three_by_three() {
  KSpaceTensor a(Dims4{3, 3, 1, 1});
  for (Index kx = 0; kx < 3; ++kx)
    for (Index ky = 0; ky < 3; ++ky) a(kx, ky, 0, 0) = static_cast<double>(3 * kx + ky + 1);
  return a;
}

// Counts kernel placements covering (kx, ky) by enumerating every placement.
std::vector<int> brute_force_multiplicity(Index nkx, Index nky, Kernel k) {
  std::vector<int> counts(static_cast<std::size_t>(nkx * nky), 0);
  for (Index py = 0; py + k.n <= nky; ++py)
    for (Index px = 0; px + k.m <= nkx; ++px)
      for (Index b = 0; b < k.n; ++b)
        for (Index a = 0; a < k.m; ++a) ++counts[static_cast<std::size_t>((px + a) + nkx * (py + b))];
  return counts;
}

// Source k-space location of Hankel entry (i, j), written out directly.
std::pair<Index, Index> source_of(Index i, Index j, Index nkx, Kernel k) {
  const Index px = nkx - k.m + 1;
  return {j % px + i % k.m, j / px + i / k.m};
}

}  // namespace

TEST_CASE("kernel parsing") {
  CHECK(parse_kernel("5x5") == Kernel{5, 5});
  CHECK(parse_kernel("3x7") == Kernel{3, 7});
  CHECK(parse_kernel("4") == Kernel{4, 4});
  CHECK(to_string(Kernel{5, 3}) == "5x3");
  CHECK_THROWS_AS(parse_kernel("0x3"), DimensionError);
  CHECK_THROWS_AS(parse_kernel("ax3"), DimensionError);
}

TEST_CASE("k-space tensor layout and arithmetic") {
  KSpaceTensor t(Dims4{3, 2, 2, 2});
  CHECK(t.size() == 24);
  t(2, 1, 1, 1) = {1.0, 2.0};
  CHECK(t.values().back() == cplx(1.0, 2.0));
  t(1, 0, 0, 1) = 3.0;
  CHECK(t.channel(0, 1)[1] == cplx(3.0));
  CHECK(t.squared_norm() == doctest::Approx(14.0));
  const KSpaceTensor u = t + t;
  CHECK(u.norm() == doctest::Approx(2.0 * t.norm()));
  CHECK((u - t) == t);
  CHECK_THROWS_AS(KSpaceTensor(Dims4{0, 1, 1, 1}), DimensionError);
  CHECK_THROWS_AS(t += KSpaceTensor(Dims4{3, 2, 2, 1}), DimensionError);
}

TEST_CASE("lifting of the 3x3 example with a 2x2 kernel") {
  const HankelTensor h = hankel_transform(three_by_three(), Kernel{2, 2});
  REQUIRE(h.n1() == 4);
  REQUIRE(h.n2() == 4);
  const double expected[4][4] = {{1, 4, 2, 5}, {4, 7, 5, 8}, {2, 5, 3, 6}, {5, 8, 6, 9}};
  for (Index j = 0; j < 4; ++j)
    for (Index i = 0; i < 4; ++i) CHECK(h(i, j, 0, 0) == cplx(expected[j][i]));
}

TEST_CASE("1x1 kernel lifting is the vectorised k-space") {
  const KSpaceTensor d = random_tensor(Dims4{4, 5, 2, 3}, 1);
  const HankelTensor h = hankel_transform(d, Kernel{1, 1});
  CHECK(h.n1() == 1);
  CHECK(h.n2() == 20);
  CHECK(std::equal(d.values().begin(), d.values().end(), h.values().begin()));
  CHECK(hankel_adjoint(h, 4, 5) == d);
  CHECK(hankel_pinv(h, 4, 5) == d);
}

TEST_CASE("lifting shapes") {
  const HankelTensor h(24, 24, Kernel{5, 5}, 8, 8);
  CHECK(h.n1() == 25);
  CHECK(h.n2() == 400);
  CHECK_THROWS_AS(hankel_transform(KSpaceTensor(Dims4{4, 4, 1, 1}), Kernel{5, 2}), DimensionError);
  CHECK_THROWS_AS(hankel_transform(KSpaceTensor(Dims4{4, 4, 1, 1}), Kernel{2, 5}), DimensionError);
  // kernel equal to the k-space extent: one placement
  const HankelTensor one = hankel_transform(random_tensor(Dims4{4, 3, 2, 2}, 2), Kernel{4, 3});
  CHECK(one.n2() == 1);
  CHECK(unfold_rx(one).cols() == 2);
}

TEST_CASE("adjoint of the 3x3 example is multiplicity weighting") {
  const KSpaceTensor a = three_by_three();
  const KSpaceTensor back = hankel_adjoint(hankel_transform(a, Kernel{2, 2}), 3, 3);
  const int c[3][3] = {{1, 2, 1}, {2, 4, 2}, {1, 2, 1}};
  for (Index kx = 0; kx < 3; ++kx)
    for (Index ky = 0; ky < 3; ++ky) CHECK(back(kx, ky, 0, 0) == static_cast<double>(c[kx][ky]) * a(kx, ky, 0, 0));
  CHECK(hankel_pinv(hankel_transform(a, Kernel{2, 2}), 3, 3) == a);
}

TEST_CASE("pseudo-inverse averages inconsistent copies") {
  // 3x1 k-space with a 2x1 kernel: location 1 is covered by both columns,
  // once holding 1 and once holding 3.
  HankelTensor h(3, 1, Kernel{2, 1}, 1, 1);
  h(0, 0, 0, 0) = 1.0;
  h(1, 0, 0, 0) = 1.0;
  h(0, 1, 0, 0) = 3.0;
  h(1, 1, 0, 0) = 3.0;
  const KSpaceTensor z = hankel_pinv(h, 3, 1);
  CHECK(z(0, 0, 0, 0) == cplx(1.0));
  CHECK(z(1, 0, 0, 0) == cplx(2.0));
  CHECK(z(2, 0, 0, 0) == cplx(3.0));
}

TEST_CASE("lifting operator adjoint identity on random instances") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> ext(1, 9);
  for (int trial = 0; trial < 50; ++trial) {
    const Index nkx = ext(rng) + 1;
    const Index nky = ext(rng) + 1;
    const Kernel k{std::uniform_int_distribution<Index>(1, nkx)(rng), std::uniform_int_distribution<Index>(1, nky)(rng)};
    const Index nrx = ext(rng) % 3 + 1;
    const Index ntx = ext(rng) % 3 + 1;
    const KSpaceTensor x = random_tensor(Dims4{nkx, nky, nrx, ntx}, 100 + trial);
    const HankelTensor y = random_hankel(nkx, nky, k, nrx, ntx, 200 + trial);
    const cplx lhs = inner(hankel_transform(x, k).values(), y.values());
    const cplx rhs = inner(x.values(), hankel_adjoint(y, nkx, nky).values());
    CHECK(rel_diff(lhs, rhs) < 1e-12);
    const KSpaceTensor round = hankel_pinv(hankel_transform(x, k), nkx, nky);
    CHECK(rel_diff(round.values(), x.values()) < 1e-12);
  }
}

TEST_CASE("lifted slices are block-Hankel") {
  const KSpaceTensor d = random_tensor(Dims4{7, 6, 2, 2}, 3);
  const Kernel k{3, 2};
  const HankelTensor h = hankel_transform(d, k);
  for (Index tx = 0; tx < 2; ++tx) {
    for (Index rx = 0; rx < 2; ++rx) {
      std::map<std::pair<Index, Index>, cplx> seen;
      for (Index j = 0; j < h.n2(); ++j) {
        for (Index i = 0; i < h.n1(); ++i) {
          const auto src = source_of(i, j, 7, k);
          CHECK(h(i, j, rx, tx) == d(src.first, src.second, rx, tx));
          const auto [it, fresh] = seen.emplace(src, h(i, j, rx, tx));
          if (!fresh) CHECK(it->second == h(i, j, rx, tx));
        }
      }
    }
  }
}

TEST_CASE("multiplicity map") {
  const MultiplicityMap c = multiplicity(3, 3, Kernel{2, 2});
  const int expected[3][3] = {{1, 2, 1}, {2, 4, 2}, {1, 2, 1}};
  for (Index kx = 0; kx < 3; ++kx)
    for (Index ky = 0; ky < 3; ++ky) CHECK(c(kx, ky) == expected[kx][ky]);

  const MultiplicityMap ones = multiplicity(4, 6, Kernel{1, 1});
  CHECK(std::all_of(ones.counts().begin(), ones.counts().end(), [](int v) { return v == 1; }));

  const MultiplicityMap big = multiplicity(24, 24, Kernel{5, 5});
  CHECK(big(0, 0) == 1);
  CHECK(big(23, 23) == 1);
  CHECK(big(12, 12) == 25);
  for (Index kx = 0; kx < 24; ++kx)
    for (Index ky = 0; ky < 24; ++ky) {
      const auto axis = [](Index i, Index m, Index n) { return std::min({i + 1, m, n - i, n - m + 1}); };
      CHECK(big(kx, ky) == axis(kx, 5, 24) * axis(ky, 5, 24));
    }
}

TEST_CASE("multiplicity matches brute-force counting for all extents up to 10") {
  for (Index nkx = 1; nkx <= 10; ++nkx)
    for (Index nky = 1; nky <= 10; ++nky)
      for (Index m = 1; m <= nkx; ++m)
        for (Index n = 1; n <= nky; ++n) {
          const MultiplicityMap c = multiplicity(nkx, nky, Kernel{m, n});
          const std::vector<int> want = brute_force_multiplicity(nkx, nky, Kernel{m, n});
          REQUIRE(std::equal(want.begin(), want.end(), c.counts().begin()));
        }
}

TEST_CASE("adjoint after lifting equals multiplicity weighting") {
  const KSpaceTensor d = random_tensor(Dims4{8, 7, 2, 3}, 4);
  const Kernel k{3, 4};
  const KSpaceTensor back = hankel_adjoint(hankel_transform(d, k), 8, 7);
  const MultiplicityMap c = multiplicity(8, 7, k);
  for (Index tx = 0; tx < 3; ++tx)
    for (Index rx = 0; rx < 2; ++rx)
      for (Index ky = 0; ky < 7; ++ky)
        for (Index kx = 0; kx < 8; ++kx)
          CHECK(std::abs(back(kx, ky, rx, tx) - static_cast<double>(c(kx, ky)) * d(kx, ky, rx, tx)) < 1e-12);
}

TEST_CASE("adjoint rejects inconsistent dims") {
  const HankelTensor h(6, 6, Kernel{3, 3}, 1, 1);
  CHECK_THROWS_AS(hankel_adjoint(h, 5, 6), DimensionError);
  CHECK_THROWS_AS(hankel_pinv(h, 6, 7), DimensionError);
}

TEST_CASE("unfolding shapes") {
  const HankelTensor small(3, 3, Kernel{2, 2}, 2, 3);
  CHECK(unfold_vc(small).rows() == 24);
  CHECK(unfold_vc(small).cols() == 4);

  const HankelTensor body(24, 24, Kernel{5, 5}, 8, 8);
  CHECK(unfold_rx(body).rows() == 200);
  CHECK(unfold_rx(body).cols() == 3200);
  CHECK(unfold_tx(body).rows() == unfold_rx(body).rows());
  CHECK(unfold_tx(body).cols() == unfold_rx(body).cols());

  const HankelTensor brain(24, 24, Kernel{5, 5}, 32, 8);
  CHECK(unfold_tx(brain).rows() == 200);
  CHECK(unfold_tx(brain).cols() == 12800);
}

TEST_CASE("unfolding index conventions") {
  const HankelTensor h = random_hankel(6, 5, Kernel{2, 3}, 3, 2, 5);
  const Index n1 = h.n1();
  const Index n2 = h.n2();
  const Matrix vc = unfold_vc(h);
  const Matrix rc = unfold_rx(h);
  const Matrix tc = unfold_tx(h);
  for (Index tx = 0; tx < 2; ++tx)
    for (Index rx = 0; rx < 3; ++rx)
      for (Index j = 0; j < n2; ++j)
        for (Index i = 0; i < n1; ++i) {
          CHECK(vc(i + n1 * (rx + 3 * tx), j) == h(i, j, rx, tx));
          CHECK(rc(i + n1 * rx, j + n2 * tx) == h(i, j, rx, tx));
          CHECK(tc(i + n1 * tx, j + n2 * rx) == h(i, j, rx, tx));
        }
}

TEST_CASE("single-channel unfoldings equal the frontal slice") {
  const HankelTensor h = random_hankel(6, 6, Kernel{3, 3}, 1, 1, 6);
  const Matrix slice = h.slice(0, 0);
  CHECK(unfold_vc(h) == slice);
  CHECK(unfold_rx(h) == slice);
  CHECK(unfold_tx(h) == slice);
}

TEST_CASE("single-transmit receive unfolding is vertical coil stacking") {
  const HankelTensor h = random_hankel(6, 6, Kernel{3, 3}, 4, 1, 7);
  CHECK(unfold_rx(h) == unfold_vc(h));
}

TEST_CASE("transmit unfolding is the receive unfolding of the swapped tensor") {
  const HankelTensor h = random_hankel(7, 6, Kernel{3, 2}, 3, 4, 8);
  CHECK(unfold_tx(h) == unfold_rx(h.swap_rx_tx()));
  CHECK(unfold_tx(h) != unfold_rx(h).transpose());
}

TEST_CASE("refolding inverts unfolding and preserves norms") {
  const HankelTensor h = random_hankel(7, 6, Kernel{3, 2}, 3, 4, 9);
  const HankelShape s = HankelShape::of(h);
  for (Unfolding u : {Unfolding::Vc, Unfolding::Tc, Unfolding::Rc}) {
    CAPTURE(to_string(u));
    const Matrix m = unfold(u, h);
    CHECK(refold(u, m, s).values().size() == h.values().size());
    CHECK(std::equal(h.values().begin(), h.values().end(), refold(u, m, s).values().begin()));
    const Matrix r = test::random_matrix(m.rows(), m.cols(), 10);
    CHECK(refold(u, r, s).values().size() == static_cast<std::size_t>(r.size()));
    double norm2 = 0.0;
    for (const cplx &v : refold(u, r, s).values()) norm2 += std::norm(v);
    CHECK(std::sqrt(norm2) == doctest::Approx(r.norm()).epsilon(1e-14));
    CHECK_THROWS_AS(refold(u, Matrix::Zero(m.rows() + 1, m.cols()), s), DimensionError);
  }
}

TEST_CASE("unfolding adjoint identity on random instances") {
  for (int trial = 0; trial < 50; ++trial) {
    const Index nrx = trial % 3 + 1;
    const Index ntx = trial % 4 + 1;
    const HankelTensor h = random_hankel(6, 5, Kernel{2, 3}, nrx, ntx, 300 + trial);
    const HankelShape s = HankelShape::of(h);
    for (Unfolding u : {Unfolding::Vc, Unfolding::Tc, Unfolding::Rc}) {
      const Matrix m = test::random_matrix(unfolded_rows(u, s.lift()), unfolded_cols(u, s.lift()), 400 + trial);
      const Matrix uh = unfold(u, h);
      const cplx lhs = inner(std::span<const cplx>(uh.data(), static_cast<std::size_t>(uh.size())),
                             std::span<const cplx>(m.data(), static_cast<std::size_t>(m.size())));
      const cplx rhs = inner(h.values(), refold(u, m, s).values());
      CHECK(rel_diff(lhs, rhs) < 1e-12);
    }
  }
}

TEST_CASE("parallel kernels match the serial reference") {
  const LiftShape s{11, 9, Kernel{4, 3}, 3, 2};
  const KSpaceTensor d = random_tensor(Dims4{11, 9, 3, 2}, 11);
  const std::size_t hsize = static_cast<std::size_t>(s.n1() * s.n2() * s.channels());
  std::vector<cplx> h_ref(hsize), h_par(hsize);
  reference::lift(s, d.values(), h_ref);
  parallel::lift(s, d.values(), h_par);
  CHECK(h_ref == h_par);

  std::vector<cplx> k_ref(static_cast<std::size_t>(d.size())), k_par(k_ref.size());
  reference::lift_adjoint(s, h_ref, k_ref, false);
  parallel::lift_adjoint(s, h_ref, k_par, false);
  CHECK(rel_diff(k_par, k_ref) < 1e-15);
  reference::lift_adjoint(s, h_ref, k_ref, true);
  parallel::lift_adjoint(s, h_ref, k_par, true);
  CHECK(rel_diff(k_par, k_ref) < 1e-15);

  for (Unfolding u : {Unfolding::Vc, Unfolding::Tc, Unfolding::Rc}) {
    Matrix m_ref, m_par;
    reference::unfold(u, s, h_ref, m_ref);
    parallel::unfold(u, s, h_ref, m_par);
    CHECK(m_ref == m_par);
    std::vector<cplx> back_ref(hsize), back_par(hsize);
    reference::refold(u, s, m_ref, back_ref);
    parallel::refold(u, s, m_ref, back_par);
    CHECK(back_ref == back_par);
    CHECK(back_ref == h_ref);
  }

  std::vector<unsigned char> bits(static_cast<std::size_t>(11 * 9 * 2));
  std::mt19937_64 rng(12);
  for (auto &b : bits) b = static_cast<unsigned char>(rng() % 3 == 0);
  const MultiplicityMap c = multiplicity(11, 9, s.kernel);
  const KSpaceTensor cons = random_tensor(Dims4{11, 9, 3, 2}, 13);
  std::vector<cplx> z_ref(k_ref.size()), z_par(k_ref.size());
  reference::combine(s, d.values(), {bits, 2}, c.counts(), cons.values(), 0.3, 2, z_ref);
  parallel::combine(s, d.values(), {bits, 2}, c.counts(), cons.values(), 0.3, 2, z_par);
  CHECK(rel_diff(z_par, z_ref) < 1e-15);
}
