#include "txlr/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "txlr/hankel.hpp"
#include "txlr/kernels.hpp"
#include "txlr/svt.hpp"

namespace txlr {

std::string to_string(Method m) {
  switch (m) {
    case Method::VC:
      return "vc";
    case Method::PRIMO:
      return "primo";
    case Method::TxLR:
      break;
  }
  return "txlr";
}

std::string to_string(Stopping s) { return s == Stopping::ChiSquare ? "chisq" : "fixed"; }

std::string to_string(StopReason s) { return s == StopReason::ChiSquare ? "chisq" : "itercap"; }

Method parse_method(const std::string &text) {
  if (text == "vc" || text == "VC") return Method::VC;
  if (text == "primo" || text == "PRIMO") return Method::PRIMO;
  if (text == "txlr" || text == "TxLR" || text == "TXLR") return Method::TxLR;
  throw ConfigError("unknown method '" + text + "' (vc, primo, txlr)");
}

Stopping parse_stopping(const std::string &text) {
  if (text == "fixed") return Stopping::FixedIterations;
  if (text == "chisq") return Stopping::ChiSquare;
  throw ConfigError("unknown stopping mode '" + text + "' (fixed, chisq)");
}

SolverConfig SolverConfig::defaults(Method m) {
  SolverConfig cfg;
  cfg.method = m;
  cfg.max_iters = m == Method::TxLR ? 50 : 100;
  return cfg;
}

std::vector<std::pair<Unfolding, Index>> SolverConfig::constraints() const {
  switch (method) {
    case Method::VC:
      return {{Unfolding::Vc, ranks.r0}};
    case Method::PRIMO:
      return {{Unfolding::Rc, ranks.r2}};
    case Method::TxLR:
      break;
  }
  return {{Unfolding::Tc, ranks.r1}, {Unfolding::Rc, ranks.r2}};
}

std::vector<std::pair<Unfolding, Index>> SolverConfig::constraints(const Dims4 &dims) const {
  // A single transmit mode leaves no transmit coupling to exploit; TxLR keeps
  // only its receive-concatenated term and coincides with PRIMO.
  if (method == Method::TxLR && dims.ntx == 1) return {{Unfolding::Rc, ranks.r2}};
  return constraints();
}

void SolverConfig::validate(const Dims4 &dims) const {
  if (kernel.m < 1 || kernel.n < 1 || kernel.m > dims.nkx || kernel.n > dims.nky) {
    throw ConfigError("kernel " + to_string(kernel) + " does not fit k-space " + to_string(dims));
  }
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (!(rho0 > 0.0)) throw ConfigError("rho0 must be > 0");
  if (!(tau > 1.0)) throw ConfigError("tau must be > 1");
  if (!(alpha > 0.0 && alpha < 2.0)) throw ConfigError("alpha must lie in (0, 2)");
  const LiftShape s{dims.nkx, dims.nky, kernel, dims.nrx, dims.ntx};
  for (const auto &[u, r] : constraints(dims)) {
    const Index limit = std::min(unfolded_rows(u, s), unfolded_cols(u, s));
    if (r < 1 || r > limit) {
      throw ConfigError("rank " + std::to_string(r) + " for " + to_string(u) + " unfolding must lie in [1, " +
                        std::to_string(limit) + "]");
    }
  }
}

namespace {

// Data-consistency solve given the summed terms W_i = X_i + psi_i.
KSpaceTensor solve_z(const KSpaceTensor &d, const SamplingMask &mask, const LiftShape &s, const MultiplicityMap &c,
                     std::span<const Unfolding> unfoldings, std::span<const Matrix> sums, double rho,
                     std::vector<cplx> &scratch) {
  const auto &dims = d.dims();
  scratch.resize(static_cast<std::size_t>(s.n1() * s.n2() * s.channels()));
  KSpaceTensor consensus(dims);
  for (std::size_t i = 0; i < unfoldings.size(); ++i) {
    parallel::refold(unfoldings[i], s, sums[i], scratch);
    parallel::lift_adjoint(s, scratch, consensus.values(), true);
  }
  KSpaceTensor z(dims);
  parallel::combine(s, d.values(), mask.view(), c.counts(), consensus.values(), rho,
                    static_cast<int>(unfoldings.size()), z.values());
  return z;
}

}  // namespace

KSpaceTensor z_update(const KSpaceTensor &d, const SamplingMask &mask, std::span<const ConsensusTerm> terms,
                      double rho, const Kernel &kernel) {
  const auto &dims = d.dims();
  if (!mask.compatible(dims)) throw DimensionError("z_update: mask does not fit data " + to_string(dims));
  const LiftShape s{dims.nkx, dims.nky, kernel, dims.nrx, dims.ntx};
  std::vector<Unfolding> unfoldings;
  std::vector<Matrix> sums;
  for (const ConsensusTerm &t : terms) {
    if (t.x.rows() != unfolded_rows(t.unfolding, s) || t.x.cols() != unfolded_cols(t.unfolding, s) ||
        t.psi.rows() != t.x.rows() || t.psi.cols() != t.x.cols()) {
      throw DimensionError("z_update: " + to_string(t.unfolding) + " term has the wrong shape");
    }
    unfoldings.push_back(t.unfolding);
    sums.emplace_back(t.x + t.psi);
  }
  std::vector<cplx> scratch;
  return solve_z(d, mask, s, multiplicity(dims.nkx, dims.nky, kernel), unfoldings, sums, rho, scratch);
}

namespace {

// Per-channel squared residual on sampled entries, and the count of them.
struct Residual {
  std::vector<double> per_rx;
  Index sampled = 0;
  [[nodiscard]] double total() const {
    double acc = 0.0;
    for (double v : per_rx) acc += v;
    return acc;
  }
};

Residual sampled_residual(const KSpaceTensor &z, const KSpaceTensor &d, const SamplingMask &mask) {
  const auto &dims = d.dims();
  if (z.dims() != dims || !mask.compatible(dims)) throw DimensionError("residual: inconsistent shapes");
  Residual r{std::vector<double>(static_cast<std::size_t>(dims.nrx), 0.0), 0};
  for (Index tx = 0; tx < dims.ntx; ++tx)
    for (Index rx = 0; rx < dims.nrx; ++rx)
      for (Index ky = 0; ky < dims.nky; ++ky)
        for (Index kx = 0; kx < dims.nkx; ++kx)
          if (mask(kx, ky, tx)) {
            r.per_rx[static_cast<std::size_t>(rx)] += std::norm(z(kx, ky, rx, tx) - d(kx, ky, rx, tx));
            ++r.sampled;
          }
  return r;
}

double relative_error(const KSpaceTensor &est, const KSpaceTensor &truth) {
  return (est - truth).norm() / truth.norm();
}

}  // namespace

double chi_square_stat(const KSpaceTensor &z, const KSpaceTensor &d, const SamplingMask &mask,
                       const NoiseModel &noise) {
  if (static_cast<Index>(noise.sigma.size()) != d.dims().nrx) {
    throw ConfigError("noise model has " + std::to_string(noise.sigma.size()) + " channels, data has " +
                      std::to_string(d.dims().nrx));
  }
  for (double s : noise.sigma)
    if (!(s > 0.0)) throw ConfigError("noise sigma must be > 0 for every receive channel");
  const Residual r = sampled_residual(z, d, mask);
  if (r.sampled == 0) throw ConfigError("chi-square statistic needs at least one sampled point");
  double acc = 0.0;
  for (std::size_t rx = 0; rx < r.per_rx.size(); ++rx) acc += r.per_rx[rx] / (noise.sigma[rx] * noise.sigma[rx]);
  return acc / static_cast<double>(r.sampled);
}

ReconReport admm_reconstruct(const KSpaceTensor &d, const SamplingMask &mask, const SolverConfig &cfg,
                             const ReconOptions &opts) {
  const auto start = std::chrono::steady_clock::now();
  const auto &dims = d.dims();
  cfg.validate(dims);
  if (!mask.compatible(dims)) throw DimensionError("mask does not fit data " + to_string(dims));
  if (cfg.stopping == Stopping::ChiSquare && !opts.noise) {
    throw ConfigError("chi-square stopping needs a noise model");
  }
  if (opts.ground_truth != nullptr && opts.ground_truth->dims() != dims) {
    throw DimensionError("ground truth shape differs from data");
  }

  const LiftShape shape{dims.nkx, dims.nky, cfg.kernel, dims.nrx, dims.ntx};
  const auto constraints = cfg.constraints(dims);
  const std::size_t nc = constraints.size();

  // Every variable starts at zero. Per constraint the loop keeps
  //   lifted[i]  U_i(T(z)) for the current z,
  //   target[i]  lifted[i] - psi_i, the point to project,
  //   sum[i]     psi_i + (1 - alpha) lifted[i] before the projection, then
  //              X_i + psi_i until the dual update.
  KSpaceTensor z(dims);
  std::vector<Unfolding> unfoldings;
  std::vector<Matrix> lifted(nc);
  std::vector<Matrix> target(nc);
  std::vector<Matrix> sum(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    unfoldings.push_back(constraints[i].first);
    lifted[i] = Matrix::Zero(unfolded_rows(constraints[i].first, shape), unfolded_cols(constraints[i].first, shape));
    target[i] = lifted[i];
    sum[i] = lifted[i];
  }
  const MultiplicityMap counts = multiplicity(dims.nkx, dims.nky, cfg.kernel);
  std::vector<cplx> hankel(static_cast<std::size_t>(shape.n1() * shape.n2() * shape.channels()));

  const double data_norm = sampled_residual(KSpaceTensor(dims), d, mask).total();
  double min_residual = std::numeric_limits<double>::infinity();

  ReconReport report;
  double rho = cfg.rho0;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    // Low-rank projections, over-relaxed against the previous U_i(T(z)):
    // X_i = alpha Gamma(target) + (1 - alpha) lifted, accumulated into sum.
#pragma omp parallel for schedule(static) if (nc > 1)
    for (std::size_t i = 0; i < nc; ++i) {
      const Index r = constraints[i].second;
      if (r >= std::min(target[i].rows(), target[i].cols())) {
        sum[i] += cfg.alpha * target[i];
        continue;
      }
      const LowRankFactors f = svt_factors(target[i], r);
      sum[i].noalias() += cfg.alpha * f.left * f.right;
    }

    z = solve_z(d, mask, shape, counts, unfoldings, sum, rho, hankel);

    // Dual update psi_i = sum - U_i(T(z)), the next projection target, and
    // the (1 - alpha) part of the next relaxed estimate.
    parallel::lift(shape, z.values(), hankel);
    const double keep = 1.0 - cfg.alpha;
    for (std::size_t i = 0; i < nc; ++i) {
      parallel::unfold(constraints[i].first, shape, hankel, lifted[i]);
      cplx *p = sum[i].data();
      cplx *t = target[i].data();
      const cplx *l = lifted[i].data();
      const Index n = sum[i].size();
#pragma omp parallel for schedule(static)
      for (Index k = 0; k < n; ++k) {
        const cplx psi = p[k] - l[k];
        t[k] = l[k] - psi;
        p[k] = psi + keep * l[k];
      }
    }
    rho *= cfg.tau;

    const double residual = std::sqrt(sampled_residual(z, d, mask).total());
    if (!std::isfinite(residual) || residual > 10.0 * std::max(min_residual, std::sqrt(data_norm))) {
      throw DivergenceError("ADMM diverged at iteration " + std::to_string(iter + 1) + ": data residual " +
                            std::to_string(residual) + " vs minimum " + std::to_string(min_residual));
    }
    if (iter >= 5 && !report.residual_trace.empty() && residual > report.residual_trace.back()) {
      ++report.residual_increases;
    }
    min_residual = std::min(min_residual, residual);
    report.residual_trace.push_back(residual);
    if (opts.ground_truth != nullptr) report.rmse_trace.push_back(relative_error(z, *opts.ground_truth));
    report.iterations_used = iter + 1;

    if (opts.noise) {
      const double chi = chi_square_stat(z, d, mask, *opts.noise);
      report.chi_trace.push_back(chi);
      if (cfg.stopping == Stopping::ChiSquare && chi > 1.0) {
        report.stop_reason = StopReason::ChiSquare;
        break;
      }
    }
  }

  report.z_final = std::move(z);
  report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace txlr
