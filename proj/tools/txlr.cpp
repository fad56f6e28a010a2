// txlr command-line driver: generate, mask, recon, sweep, spectrum, maps.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "txlr/experiment.hpp"
#include "txlr/io.hpp"
#include "txlr/metrics.hpp"
#include "txlr/sampling.hpp"
#include "txlr/solver.hpp"

using nlohmann::json;
using namespace txlr;

namespace {

constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

// Echoes every option of a subcommand (as given or defaulted) into a JSON
// object stored with the outputs.
json flags_of(const CLI::App &app) {
  json out = json::object();
  for (const CLI::Option *opt : app.get_options()) {
    if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
    std::string name = opt->get_name();
    while (!name.empty() && name.front() == '-') name.erase(name.begin());
    const auto results = opt->results();
    if (!results.empty()) {
      out[name] = results.size() == 1 ? json(results.front()) : json(results);
    } else if (!opt->get_default_str().empty()) {
      out[name] = opt->get_default_str();
    }
  }
  out["command"] = app.get_name();
  return out;
}

std::pair<Index, Index> parse_ranks(const std::string &text) {
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) {
      const Index r = std::stol(text);
      return {r, r};
    }
    return {std::stol(text.substr(0, comma)), std::stol(text.substr(comma + 1))};
  } catch (const std::exception &) {
    throw ConfigError("--rank expects R1 or R1,R2, got '" + text + "'");
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

struct GenerateArgs {
  std::string out = "slice.kten";
  int slice = 0;
  std::uint64_t seed = 1;
  Index image_size = 48;
  Index crop = 24;
  Index nrx = 8;
  Index ntx = 8;
  int order = 3;
  double decay = 1.0;
  std::string phantom = "body_ellipses";
};

struct MaskArgs {
  std::string out = "mask.kten";
  Index nkx = 24;
  Index nky = 24;
  Index ntx = 8;
  double r = 4;
  std::uint64_t seed = 1;
  bool shared = false;
  bool no_dc = false;
};

struct ReconArgs {
  std::string in;
  std::string mask;
  std::string out = "recon.kten";
  std::string method = "txlr";
  std::string kernel = "5x5";
  std::string rank = "50";
  std::optional<Index> rank_vc;
  std::optional<int> iters;
  std::string stop = "fixed";
  std::optional<double> sigma;
  std::string truth;
  std::string trace;
  std::optional<double> rho0;
  std::optional<double> tau;
  std::optional<double> alpha;
};

struct SweepArgs {
  std::string config;
  std::vector<std::string> overrides;
};

struct SpectrumArgs {
  std::string in;
  std::string out = "spectrum.csv";
  std::string kernel = "5x5";
  std::vector<std::string> unfoldings{"vc", "tc", "rc"};
  std::uint64_t seed = 1;
  bool no_random = false;
};

struct MapsArgs {
  std::string in;
  std::string out = "maps.kten";
  double threshold = 0.1;
};

int run_generate(const GenerateArgs &a, const json &flags) {
  ExperimentConfig cfg;
  cfg.seed = a.seed;
  cfg.image_size = a.image_size;
  cfg.crop = a.crop;
  cfg.nrx = a.nrx;
  cfg.ntx = a.ntx;
  cfg.order = a.order;
  cfg.decay = a.decay;
  cfg.phantom = parse_phantom_kind(a.phantom);
  if (cfg.crop > cfg.image_size) throw ConfigError("--crop must not exceed --size");
  GeneratedSlice g = generate_slice(cfg, a.slice);
  json meta = g.meta;
  meta["flags"] = flags;
  write_kten(g.kspace, a.out, meta);
  std::cout << "wrote " << a.out << " dims " << to_string(g.kspace.dims()) << '\n';
  return 0;
}

int run_mask(const MaskArgs &a, const json &flags) {
  PoissonDiscOptions opts;
  opts.force_center = !a.no_dc;
  const SamplingMask m = mask_variants_per_tx(a.nkx, a.nky, a.r, a.ntx, a.seed, opts, a.shared);
  json meta;
  meta["flags"] = flags;
  write_mask(m, a.out, meta);
  std::cout << "wrote " << a.out << " R_achieved " << fmt(m.r_achieved()) << '\n';
  return 0;
}

int run_recon(const ReconArgs &a, const json &flags) {
  const KtenData in = read_kten(a.in);
  const KSpaceTensor &d = in.tensor;
  const Dims4 &dims = d.dims();
  SamplingMask mask = a.mask.empty() ? SamplingMask::full(dims.nkx, dims.nky) : read_mask(a.mask);
  if (!mask.compatible(dims)) throw ConfigError("mask does not match data dims " + to_string(dims));

  SolverConfig cfg = SolverConfig::defaults(parse_method(a.method));
  cfg.kernel = parse_kernel(a.kernel);
  const auto [r1, r2] = parse_ranks(a.rank);
  cfg.ranks = {a.rank_vc.value_or(r1), r1, r2};
  if (a.iters) cfg.max_iters = *a.iters;
  cfg.stopping = parse_stopping(a.stop);
  if (a.rho0) cfg.rho0 = *a.rho0;
  if (a.tau) cfg.tau = *a.tau;
  if (a.alpha) cfg.alpha = *a.alpha;

  ReconOptions opts;
  if (a.sigma) opts.noise = NoiseModel{std::vector<double>(static_cast<std::size_t>(dims.nrx), *a.sigma)};
  std::optional<KSpaceTensor> truth;
  if (!a.truth.empty()) {
    truth = read_kten(a.truth).tensor;
    opts.ground_truth = &*truth;
  }
  const ReconReport rep = admm_reconstruct(d, mask, cfg, opts);

  json meta = in.meta;
  meta["flags"] = flags;
  meta["iterations_used"] = rep.iterations_used;
  meta["stop_reason"] = to_string(rep.stop_reason);
  meta["wall_ms"] = rep.wall_ms;
  if (!rep.chi_trace.empty()) meta["chi_final"] = rep.chi_trace.back();
  if (truth) meta["rmse"] = rmse(rep.z_final, *truth);
  write_kten(rep.z_final, a.out, meta);

  if (!a.trace.empty()) {
    std::ofstream tr(a.trace);
    if (!tr) throw IoError("cannot write " + a.trace);
    tr << "iteration,residual,chi,rmse\n";
    const auto at = [](const std::vector<double> &v, std::size_t i) {
      return i < v.size() ? fmt(v[i]) : std::string("nan");
    };
    for (std::size_t i = 0; i < rep.residual_trace.size(); ++i)
      tr << i + 1 << ',' << at(rep.residual_trace, i) << ',' << at(rep.chi_trace, i) << ',' << at(rep.rmse_trace, i)
         << '\n';
  }
  std::cout << to_string(cfg.method) << ": " << rep.iterations_used << " iterations (" << to_string(rep.stop_reason)
            << ")";
  if (truth) std::cout << ", rmse " << fmt(rmse(rep.z_final, *truth));
  std::cout << ", wrote " << a.out << '\n';
  return 0;
}

int run_sweep(const SweepArgs &a) {
  ExperimentConfig cfg = a.config.empty() ? ExperimentConfig{} : load_config(a.config);
  for (const std::string &kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  const ExperimentResult res = run_experiment(cfg);
  int failed = 0;
  for (const ResultRow &r : res.rows) failed += r.error.empty() ? 0 : 1;
  std::cout << "wrote " << res.rows.size() << " rows to " << res.csv_path.string();
  if (failed > 0) std::cout << " (" << failed << " failed cells)";
  std::cout << '\n';
  return 0;
}

int run_spectrum(const SpectrumArgs &a) {
  const KSpaceTensor d = read_kten(a.in).tensor;
  const Kernel k = parse_kernel(a.kernel);
  std::ofstream out(a.out);
  if (!out) throw IoError("cannot write " + a.out);
  out << "source,unfolding,rows,cols,index,value,normalized\n";
  const auto emit = [&out](const std::string &source, const SingularSpectrum &s) {
    const double s1 = s.values.size() == 0 || s.values(0) == 0.0 ? 1.0 : s.values(0);
    for (Index i = 0; i < s.values.size(); ++i)
      out << source << ',' << to_string(s.unfolding) << ',' << s.rows << ',' << s.cols << ',' << i + 1 << ','
          << fmt(s.values(i)) << ',' << fmt(s.values(i) / s1) << '\n';
  };
  for (const std::string &name : a.unfoldings) {
    const Unfolding u = parse_unfolding(name);
    emit("data", singular_spectrum(d, k, u));
    if (!a.no_random) emit("random", random_baseline_spectrum(d, k, u, a.seed));
  }
  std::cout << "wrote " << a.out << '\n';
  return 0;
}

int run_maps(const MapsArgs &a, const json &flags) {
  const KtenData in = read_kten(a.in);
  const RelativeTxMaps maps = relative_tx_maps(in.tensor, a.threshold);
  const auto nx = maps.support.rows();
  const auto ny = maps.support.cols();
  KSpaceTensor out(Dims4{nx, ny, 1, static_cast<Index>(maps.maps.size())});
  for (Index t = 0; t < static_cast<Index>(maps.maps.size()); ++t)
    for (Index y = 0; y < ny; ++y)
      for (Index x = 0; x < nx; ++x)
        out(x, y, 0, t) = maps.support(x, y) ? maps.maps[static_cast<std::size_t>(t)](x, y) : cplx{};
  json meta = in.meta;
  meta["kind"] = "relative_tx_maps";
  meta["flags"] = flags;
  write_kten(out, a.out, meta);
  std::cout << "wrote " << a.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Multi-channel transmit/receive k-space completion by joint low-rank Hankel constraints"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto *g = app.add_subcommand("generate", "Simulate one phantom slice and write its cropped k-space");
  g->add_option("--out,-o", gen.out, "Output .kten path")->capture_default_str();
  g->add_option("--slice", gen.slice, "Slice index (selects phantom and map seeds)")->capture_default_str();
  g->add_option("--seed", gen.seed, "Base seed")->capture_default_str();
  g->add_option("--size", gen.image_size, "Image matrix size before cropping")->capture_default_str();
  g->add_option("--crop", gen.crop, "Central k-space crop")->capture_default_str();
  g->add_option("--nrx", gen.nrx, "Receive channels")->capture_default_str();
  g->add_option("--ntx", gen.ntx, "Transmit modes")->capture_default_str();
  g->add_option("--order", gen.order, "Sensitivity harmonic order")->capture_default_str();
  g->add_option("--decay", gen.decay, "Harmonic amplitude decay")->capture_default_str();
  g->add_option("--phantom", gen.phantom, "disc, shepp_like or body_ellipses")->capture_default_str();

  MaskArgs mk;
  auto *m = app.add_subcommand("mask", "Write a Poisson-disc sampling mask");
  m->add_option("--out,-o", mk.out, "Output .kten path")->capture_default_str();
  m->add_option("--nkx", mk.nkx)->capture_default_str();
  m->add_option("--nky", mk.nky)->capture_default_str();
  m->add_option("--ntx", mk.ntx, "Number of mask planes")->capture_default_str();
  m->add_option("-R,--accel", mk.r, "Acceleration factor")->capture_default_str();
  m->add_option("--seed", mk.seed)->capture_default_str();
  m->add_flag("--shared", mk.shared, "One pattern for every transmit mode");
  m->add_flag("--no-dc", mk.no_dc, "Do not force the centre sample");

  ReconArgs rc;
  auto *r = app.add_subcommand("recon", "Reconstruct one under-sampled tensor");
  r->add_option("--in,-i", rc.in, "Under-sampled data (.kten)")->required();
  r->add_option("--mask", rc.mask, "Mask (.kten); default fully sampled");
  r->add_option("--out,-o", rc.out, "Output .kten path")->capture_default_str();
  r->add_option("--method", rc.method, "vc, primo or txlr")->capture_default_str();
  r->add_option("--kernel", rc.kernel, "Kernel size MxN")->capture_default_str();
  r->add_option("--rank", rc.rank, "R1[,R2]: Tc and Rc ranks (PRIMO uses R2, VC uses R1)")->capture_default_str();
  r->add_option("--rank-vc", rc.rank_vc, "Override the VC rank");
  r->add_option("--iters", rc.iters, "Iteration cap (default 50 TxLR, 100 VC/PRIMO)");
  r->add_option("--stop", rc.stop, "fixed or chisq")->capture_default_str();
  r->add_option("--sigma", rc.sigma, "Noise std per receive channel (needed for chisq)");
  r->add_option("--truth", rc.truth, "Ground truth (.kten) for an RMSE trace");
  r->add_option("--trace", rc.trace, "Write per-iteration residual/chi/rmse CSV");
  r->add_option("--rho0", rc.rho0);
  r->add_option("--tau", rc.tau);
  r->add_option("--alpha", rc.alpha);

  SweepArgs sw;
  auto *s = app.add_subcommand("sweep", "Run an experiment sweep and write results.csv");
  s->add_option("--config,-c", sw.config, "key = value config file");
  s->add_option("--set", sw.overrides, "Override a config key (key=value), repeatable");

  SpectrumArgs sp;
  auto *p = app.add_subcommand("spectrum", "Singular spectra of the unfoldings as CSV");
  p->add_option("--in,-i", sp.in, "Input .kten")->required();
  p->add_option("--out,-o", sp.out)->capture_default_str();
  p->add_option("--kernel", sp.kernel)->capture_default_str();
  p->add_option("--unfolding", sp.unfoldings, "vc, tc, rc (repeatable)");
  p->add_option("--seed", sp.seed, "Seed of the random baseline")->capture_default_str();
  p->add_flag("--no-random", sp.no_random, "Skip the random-matrix baseline");

  MapsArgs mp;
  auto *q = app.add_subcommand("maps", "Relative transmit maps from a completed tensor");
  q->add_option("--in,-i", mp.in, "Completed .kten")->required();
  q->add_option("--out,-o", mp.out)->capture_default_str();
  q->add_option("--threshold", mp.threshold, "Support threshold relative to the maximum")->capture_default_str();

  if (argc <= 1) {
    std::cerr << app.help();
    return kUsageError;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*g) return run_generate(gen, flags_of(*g));
    if (*m) return run_mask(mk, flags_of(*m));
    if (*r) return run_recon(rc, flags_of(*r));
    if (*s) return run_sweep(sw);
    if (*p) return run_spectrum(sp);
    if (*q) return run_maps(mp, flags_of(*q));
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}
