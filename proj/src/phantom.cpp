#include "txlr/phantom.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>

namespace txlr {

PhantomKind parse_phantom_kind(const std::string &text) {
  if (text == "disc") return PhantomKind::Disc;
  if (text == "shepp_like") return PhantomKind::SheppLike;
  if (text == "body_ellipses") return PhantomKind::BodyEllipses;
  throw ConfigError("unknown phantom kind '" + text + "' (disc, shepp_like, body_ellipses)");
}

std::string to_string(PhantomKind k) {
  switch (k) {
    case PhantomKind::Disc:
      return "disc";
    case PhantomKind::SheppLike:
      return "shepp_like";
    case PhantomKind::BodyEllipses:
      break;
  }
  return "body_ellipses";
}

namespace {

struct Ellipse {
  double value;
  double cx, cy;  // centre, fraction of half-FOV
  double ax, ay;  // semi-axes, fraction of half-FOV
  double angle;   // radians
};

// Smoothed ellipse indicator; the edge is a ~1 pixel wide tanh ramp so the
// image is piecewise smooth rather than aliased.
void paint(RealImage &img, const Ellipse &e, bool replace) {
  const double hx = img.rows() / 2.0;
  const double hy = img.cols() / 2.0;
  const double c = std::cos(e.angle);
  const double s = std::sin(e.angle);
  const double pixel = 1.0 / std::min(hx, hy);
  for (Index y = 0; y < img.cols(); ++y) {
    for (Index x = 0; x < img.rows(); ++x) {
      const double u = (x + 0.5 - hx) / hx - e.cx;
      const double v = (y + 0.5 - hy) / hy - e.cy;
      const double a = (c * u + s * v) / e.ax;
      const double b = (-s * u + c * v) / e.ay;
      const double rho = std::sqrt(a * a + b * b);
      // signed distance estimate in units of half-FOV
      const double dist = (rho - 1.0) * std::min(e.ax, e.ay);
      const double w = 0.5 * (1.0 - std::tanh(dist / pixel));
      if (w < 1e-12) continue;
      img(x, y) = replace ? (1.0 - w) * img(x, y) + w * e.value : img(x, y) + w * e.value;
    }
  }
}

RealImage disc(Index nx, Index ny) {
  RealImage img = RealImage::Zero(nx, ny);
  const double cx = nx / 2.0;
  const double cy = ny / 2.0;
  const double radius = 0.4 * std::min(nx, ny);
  for (Index y = 0; y < ny; ++y)
    for (Index x = 0; x < nx; ++x)
      if (std::hypot(x + 0.5 - cx, y + 0.5 - cy) <= radius) img(x, y) = 1.0;
  return img;
}

}  // namespace

RealImage generate_phantom(Index nx, Index ny, PhantomKind kind, std::uint64_t seed) {
  if (nx < 16 || ny < 16) throw DimensionError("phantom needs at least 16x16 pixels");
  if (kind == PhantomKind::Disc) return disc(nx, ny);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  const auto j = [&](double amount) { return amount * jitter(rng); };
  RealImage img = RealImage::Zero(nx, ny);

  if (kind == PhantomKind::SheppLike) {
    // Modified Shepp-Logan intensities (all layers non-negative after summing).
    const Ellipse layers[] = {
        {1.0, 0.0, 0.0, 0.69, 0.92, 0.0},
        {-0.8, 0.0, -0.0184, 0.6624, 0.874, 0.0},
        {-0.2, 0.22, 0.0, 0.11, 0.31, -0.314},
        {-0.2, -0.22, 0.0, 0.16, 0.41, 0.314},
        {0.1, 0.0, 0.35, 0.21, 0.25, 0.0},
        {0.1, 0.0, 0.1, 0.046, 0.046, 0.0},
        {0.1, 0.0, -0.1, 0.046, 0.046, 0.0},
        {0.1, -0.08, -0.605, 0.046, 0.023, 0.0},
    };
    for (Ellipse e : layers) {
      e.cx += j(0.01);
      e.cy += j(0.01);
      paint(img, e, false);
    }
    return img.cwiseMax(0.0);
  }

  // Body cross-section: torso, two lungs, heart, spine, liver-ish blob.
  paint(img, {0.6, j(0.02), j(0.02), 0.78 + j(0.04), 0.58 + j(0.04), j(0.05)}, true);
  paint(img, {0.15, -0.36 + j(0.03), -0.05 + j(0.03), 0.22 + j(0.03), 0.33 + j(0.03), 0.2 + j(0.1)}, true);
  paint(img, {0.15, 0.36 + j(0.03), -0.05 + j(0.03), 0.22 + j(0.03), 0.33 + j(0.03), -0.2 + j(0.1)}, true);
  paint(img, {1.0, 0.05 + j(0.03), 0.12 + j(0.03), 0.2 + j(0.03), 0.17 + j(0.03), 0.6 + j(0.2)}, true);
  paint(img, {0.8, j(0.02), -0.42 + j(0.02), 0.08 + j(0.01), 0.08 + j(0.01), 0.0}, true);
  paint(img, {0.4, -0.3 + j(0.04), 0.3 + j(0.04), 0.25 + j(0.03), 0.12 + j(0.03), -0.3 + j(0.1)}, true);
  return img.cwiseMax(0.0);
}

SensitivitySet generate_sensitivities(Index nx, Index ny, Index nrx, Index ntx, int order, std::uint64_t seed,
                                      const SensitivityOptions &opts) {
  if (order < 1) throw ParameterError("sensitivity order must be >= 1");
  if (nrx < 1 || ntx < 1) throw ParameterError("channel counts must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  const int h = order - 1;

  const auto make_map = [&]() {
    ComplexImage map = ComplexImage::Zero(nx, ny);
    for (int q = -h; q <= h; ++q) {
      for (int p = -h; p <= h; ++p) {
        cplx a(gauss(rng), gauss(rng));
        a *= std::pow(opts.decay, std::abs(p) + std::abs(q));
        if (p == 0 && q == 0) a += opts.dc_offset * a / std::max(std::abs(a), 1e-12);
        for (Index y = 0; y < ny; ++y) {
          for (Index x = 0; x < nx; ++x) {
            const double phase = 2.0 * std::numbers::pi *
                                 (static_cast<double>(p) * static_cast<double>(x - nx / 2) / static_cast<double>(nx) +
                                  static_cast<double>(q) * static_cast<double>(y - ny / 2) / static_cast<double>(ny));
            map(x, y) += a * std::polar(1.0, phase);
          }
        }
      }
    }
    return map;
  };

  SensitivitySet out;
  out.order = order;
  for (Index t = 0; t < ntx; ++t) out.tx_maps.push_back(make_map());
  for (Index r = 0; r < nrx; ++r) out.rx_maps.push_back(make_map());
  return out;
}

ImageStack image_stack(const RealImage &phantom, const SensitivitySet &sens) {
  const Index nx = phantom.rows();
  const Index ny = phantom.cols();
  const auto nrx = static_cast<Index>(sens.rx_maps.size());
  const auto ntx = static_cast<Index>(sens.tx_maps.size());
  for (const auto *maps : {&sens.tx_maps, &sens.rx_maps})
    for (const auto &m : *maps)
      if (m.rows() != nx || m.cols() != ny) throw DimensionError("sensitivity map and phantom sizes differ");
  ImageStack out(Dims4{nx, ny, nrx, ntx});
  for (Index tx = 0; tx < ntx; ++tx) {
    for (Index rx = 0; rx < nrx; ++rx) {
      Eigen::Map<ComplexImage> dst(out.channel(rx, tx).data(), nx, ny);
      dst = phantom.cast<cplx>().cwiseProduct(sens.tx_maps[static_cast<std::size_t>(tx)])
                .cwiseProduct(sens.rx_maps[static_cast<std::size_t>(rx)]);
    }
  }
  return out;
}

KSpaceTensor simulate_kspace(const RealImage &phantom, const SensitivitySet &sens) {
  return to_kspace(image_stack(phantom, sens));
}

namespace {

// FFTW planning is not thread-safe; plans are cached and executed with the
// new-array interface, which is.
class PlanCache {
 public:
  static PlanCache &instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(Index nx, Index ny, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::tuple{nx, ny, sign};
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<fftw_complex> scratch(static_cast<std::size_t>(nx * ny));
    // FFTW is row-major; our images are x-fastest, so y is the slow axis.
    fftw_plan p = fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), scratch.data(), scratch.data(), sign,
                                   FFTW_ESTIMATE);
    if (p == nullptr) throw NumericalError("fftw plan creation failed");
    plans_.emplace(key, p);
    return p;
  }

  PlanCache(const PlanCache &) = delete;
  PlanCache &operator=(const PlanCache &) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto &[key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<Index, Index, int>, fftw_plan> plans_;
};

// out(i) = in((i + shift) mod n) along both axes.
ComplexImage circshift(const ComplexImage &in, Index sx, Index sy) {
  const Index nx = in.rows();
  const Index ny = in.cols();
  ComplexImage out(nx, ny);
  for (Index y = 0; y < ny; ++y)
    for (Index x = 0; x < nx; ++x) out(x, y) = in((x + sx) % nx, (y + sy) % ny);
  return out;
}

ComplexImage centred_transform(const ComplexImage &in, int sign) {
  const Index nx = in.rows();
  const Index ny = in.cols();
  // Move the centre sample to index 0, transform, move index 0 back to centre.
  ComplexImage work = circshift(in, nx / 2, ny / 2);
  fftw_plan plan = PlanCache::instance().get(nx, ny, sign);
  auto *buf = reinterpret_cast<fftw_complex *>(work.data());
  fftw_execute_dft(plan, buf, buf);
  ComplexImage out = circshift(work, nx - nx / 2, ny - ny / 2);
  out /= std::sqrt(static_cast<double>(nx * ny));
  return out;
}

}  // namespace

ComplexImage dft2_centered(const ComplexImage &image) { return centred_transform(image, FFTW_FORWARD); }

ComplexImage idft2_centered(const ComplexImage &kspace) { return centred_transform(kspace, FFTW_BACKWARD); }

namespace {

KSpaceTensor transform_stack(const KSpaceTensor &in, int sign) {
  const auto &d = in.dims();
  KSpaceTensor out(d);
  for (Index tx = 0; tx < d.ntx; ++tx) {
    for (Index rx = 0; rx < d.nrx; ++rx) {
      const Eigen::Map<const ComplexImage> src(in.channel(rx, tx).data(), d.nkx, d.nky);
      Eigen::Map<ComplexImage>(out.channel(rx, tx).data(), d.nkx, d.nky) = centred_transform(src, sign);
    }
  }
  return out;
}

}  // namespace

KSpaceTensor to_kspace(const ImageStack &images) { return transform_stack(images, FFTW_FORWARD); }

ImageStack to_images(const KSpaceTensor &kspace) { return transform_stack(kspace, FFTW_BACKWARD); }

KSpaceTensor crop_kspace(const KSpaceTensor &d, Index cx, Index cy) {
  const auto &dims = d.dims();
  if (cx < 1 || cy < 1 || cx > dims.nkx || cy > dims.nky) {
    throw DimensionError("crop " + std::to_string(cx) + "x" + std::to_string(cy) + " does not fit " + to_string(dims));
  }
  const Index x0 = dims.nkx / 2 - cx / 2;
  const Index y0 = dims.nky / 2 - cy / 2;
  KSpaceTensor out(Dims4{cx, cy, dims.nrx, dims.ntx});
  for (Index tx = 0; tx < dims.ntx; ++tx)
    for (Index rx = 0; rx < dims.nrx; ++rx)
      for (Index y = 0; y < cy; ++y)
        for (Index x = 0; x < cx; ++x) out(x, y, rx, tx) = d(x0 + x, y0 + y, rx, tx);
  return out;
}

}  // namespace txlr
