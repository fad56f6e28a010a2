#include "txlr/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>

#include "txlr/io.hpp"
#include "txlr/metrics.hpp"
#include "txlr/sampling.hpp"

namespace txlr {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string &value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string &key, const std::string &v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception &) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
  }
}

long long to_int(const std::string &key, const std::string &v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception &) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not an integer");
  }
}

bool to_bool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': '" + v + "' is not a boolean");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string csv_quote(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::uint64_t value_stream(double v) { return std::bit_cast<std::uint64_t>(v); }

}  // namespace

void ExperimentConfig::set(const std::string &key, const std::string &raw) {
  const std::string value = trim(raw);
  if (key == "source") {
    source = value;
  } else if (key == "slices") {
    slices = static_cast<int>(to_int(key, value));
  } else if (key == "image_size") {
    image_size = to_int(key, value);
  } else if (key == "crop") {
    crop = to_int(key, value);
  } else if (key == "nrx") {
    nrx = to_int(key, value);
  } else if (key == "ntx") {
    ntx = to_int(key, value);
  } else if (key == "order") {
    order = static_cast<int>(to_int(key, value));
  } else if (key == "decay") {
    decay = to_double(key, value);
  } else if (key == "phantom") {
    phantom = parse_phantom_kind(value);
  } else if (key == "methods") {
    methods.clear();
    for (const auto &m : split_list(value)) methods.push_back(parse_method(m));
  } else if (key == "R") {
    accelerations.clear();
    for (const auto &r : split_list(value)) accelerations.push_back(to_double(key, r));
  } else if (key == "psnr") {
    psnr_db.clear();
    for (const auto &p : split_list(value)) psnr_db.push_back(p == "inf" ? std::numeric_limits<double>::infinity() : to_double(key, p));
  } else if (key == "kernel") {
    try {
      kernel = parse_kernel(value);
    } catch (const DimensionError &e) {
      throw ConfigError(e.what());
    }
  } else if (key == "ranks") {
    const auto parts = split_list(value);
    if (parts.empty() || parts.size() > 2) throw ConfigError("ranks takes R1 or R1,R2");
    ranks.r1 = to_int(key, parts[0]);
    ranks.r2 = parts.size() == 2 ? to_int(key, parts[1]) : ranks.r1;
  } else if (key == "rank_vc") {
    ranks.r0 = to_int(key, value);
  } else if (key == "iters") {
    iters = static_cast<int>(to_int(key, value));
  } else if (key == "stop") {
    stopping = parse_stopping(value);
  } else if (key == "seed") {
    seed = static_cast<std::uint64_t>(to_int(key, value));
  } else if (key == "mask_mode") {
    if (value != "per_tx" && value != "shared") throw ConfigError("mask_mode must be per_tx or shared");
    per_tx_masks = value == "per_tx";
  } else if (key == "force_dc") {
    force_dc = to_bool(key, value);
  } else if (key == "map_threshold") {
    map_threshold = to_double(key, value);
  } else if (key == "output") {
    output_dir = value;
  } else if (key == "workers") {
    workers = static_cast<int>(to_int(key, value));
  } else if (key == "save_recons") {
    save_recons = to_bool(key, value);
  } else if (key == "traces") {
    write_traces = to_bool(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw ConfigError("no methods to run");
  if (accelerations.empty()) throw ConfigError("no acceleration factors to run");
  if (psnr_db.empty()) throw ConfigError("no PSNR values to run");
  if (source == "generate") {
    if (slices < 1) throw ConfigError("slices must be >= 1");
    if (crop < 1 || crop > image_size) throw ConfigError("crop must lie in [1, image_size]");
  } else if (!std::filesystem::exists(source)) {
    throw ConfigError("source '" + source + "' does not exist");
  }
  if (workers < 0) throw ConfigError("workers must be >= 0");
}

nlohmann::json ExperimentConfig::to_json() const {
  std::vector<std::string> method_names;
  for (Method m : methods) method_names.push_back(to_string(m));
  return {{"source", source},
          {"slices", slices},
          {"image_size", image_size},
          {"crop", crop},
          {"nrx", nrx},
          {"ntx", ntx},
          {"order", order},
          {"decay", decay},
          {"phantom", to_string(phantom)},
          {"methods", method_names},
          {"R", accelerations},
          {"psnr", psnr_db},
          {"kernel", to_string(kernel)},
          {"ranks", {ranks.r0, ranks.r1, ranks.r2}},
          {"iters", iters},
          {"stop", to_string(stopping)},
          {"seed", seed},
          {"mask_mode", per_tx_masks ? "per_tx" : "shared"},
          {"force_dc", force_dc},
          {"map_threshold", map_threshold}};
}

SolverConfig ExperimentConfig::solver(Method m) const {
  SolverConfig cfg = SolverConfig::defaults(m);
  cfg.kernel = kernel;
  cfg.ranks = ranks;
  cfg.stopping = stopping;
  if (iters > 0) cfg.max_iters = iters;
  return cfg;
}

ExperimentConfig parse_config(std::istream &in) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in);
}

std::string csv_header() {
  return "slice,method,R,psnr_db,kernel,r1,r2,iterations_used,stop_reason,rmse,map_rmse,chi_final,wall_ms,error";
}

std::string to_csv(const ResultRow &r) {
  std::ostringstream os;
  os << r.slice << ',' << to_string(r.method) << ',' << format_double(r.r) << ',' << format_double(r.psnr_db) << ','
     << to_string(r.kernel) << ',' << r.r1 << ',' << r.r2 << ',' << r.iterations_used << ','
     << to_string(r.stop_reason) << ',' << format_double(r.rmse) << ',' << format_double(r.map_rmse) << ','
     << format_double(r.chi_final) << ',' << format_double(r.wall_ms) << ',' << csv_quote(r.error);
  return os.str();
}

GeneratedSlice generate_slice(const ExperimentConfig &cfg, int slice) {
  const std::uint64_t slice_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(slice));
  GeneratedSlice out;
  out.phantom = generate_phantom(cfg.image_size, cfg.image_size, cfg.phantom, mix_seed(slice_seed, 1));
  SensitivityOptions opts;
  opts.decay = cfg.decay;
  out.sensitivities =
      generate_sensitivities(cfg.image_size, cfg.image_size, cfg.nrx, cfg.ntx, cfg.order, mix_seed(slice_seed, 2), opts);
  out.kspace = crop_kspace(simulate_kspace(out.phantom, out.sensitivities), cfg.crop, cfg.crop);
  out.meta = {{"kind", "ground_truth"},
              {"slice", slice},
              {"image_size", cfg.image_size},
              {"crop", cfg.crop},
              {"order", cfg.order},
              {"decay", cfg.decay},
              {"phantom", to_string(cfg.phantom)},
              {"seed", cfg.seed}};
  return out;
}

std::vector<KSpaceTensor> load_ground_truth(const ExperimentConfig &cfg) {
  std::vector<KSpaceTensor> stack;
  if (cfg.source == "generate") {
    stack.resize(static_cast<std::size_t>(cfg.slices));
    for (int s = 0; s < cfg.slices; ++s) stack[static_cast<std::size_t>(s)] = generate_slice(cfg, s).kspace;
    return stack;
  }
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(cfg.source)) {
    for (const auto &entry : std::filesystem::directory_iterator(cfg.source))
      if (entry.path().extension() == ".kten") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  } else {
    files.emplace_back(cfg.source);
  }
  if (files.empty()) throw ConfigError("no .kten files in " + cfg.source);
  for (const auto &f : files) {
    KSpaceTensor t = read_kten(f).tensor;
    const auto &d = t.dims();
    if (d.nkx > cfg.crop || d.nky > cfg.crop) t = crop_kspace(t, std::min(cfg.crop, d.nkx), std::min(cfg.crop, d.nky));
    stack.push_back(std::move(t));
  }
  return stack;
}

namespace {

struct Cell {
  int slice;
  Method method;
  double r;
  double psnr;
};

struct CellOutput {
  ResultRow row;
  std::vector<double> rmse_trace;
  std::vector<double> chi_trace;
};

CellOutput run_cell(const ExperimentConfig &cfg, const Cell &cell, const KSpaceTensor &truth) {
  CellOutput out;
  ResultRow &row = out.row;
  row.slice = cell.slice;
  row.method = cell.method;
  row.r = cell.r;
  row.psnr_db = cell.psnr;
  row.kernel = cfg.kernel;
  const SolverConfig solver = cfg.solver(cell.method);
  const auto cons = solver.constraints();
  row.r1 = cons[0].second;
  row.r2 = cons.size() > 1 ? cons[1].second : 0;
  row.rmse = row.map_rmse = row.chi_final = std::numeric_limits<double>::quiet_NaN();
  try {
    const auto &d = truth.dims();
    const std::uint64_t slice_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(cell.slice));
    PoissonDiscOptions mopts;
    mopts.force_center = cfg.force_dc;
    const SamplingMask mask = mask_variants_per_tx(d.nkx, d.nky, cell.r, d.ntx, mix_seed(slice_seed, value_stream(cell.r)),
                                                   mopts, !cfg.per_tx_masks);
    const NoisyData noisy =
        add_noise(truth, {cell.psnr, mix_seed(slice_seed, value_stream(cell.psnr) ^ 0x6e6f697365ULL)});
    const KSpaceTensor data = apply_mask(noisy.data, mask);

    ReconOptions ropts;
    const bool has_noise = !noisy.noise.sigma.empty() && noisy.noise.sigma.front() > 0.0;
    if (has_noise) ropts.noise = noisy.noise;
    if (cfg.write_traces) ropts.ground_truth = &truth;
    const ReconReport rep = admm_reconstruct(data, mask, solver, ropts);

    row.iterations_used = rep.iterations_used;
    row.stop_reason = rep.stop_reason;
    row.rmse = rmse(rep.z_final, truth);
    row.chi_final = rep.chi_trace.empty() ? std::numeric_limits<double>::quiet_NaN() : rep.chi_trace.back();
    row.wall_ms = rep.wall_ms;
    try {
      row.map_rmse = map_rmse(relative_tx_maps(rep.z_final, cfg.map_threshold), relative_tx_maps(truth, cfg.map_threshold));
    } catch (const MetricError &) {
      row.map_rmse = std::numeric_limits<double>::quiet_NaN();
    }
    out.rmse_trace = rep.rmse_trace;
    out.chi_trace = rep.chi_trace;
    if (cfg.save_recons) {
      nlohmann::json meta = cfg.to_json();
      meta["kind"] = "reconstruction";
      meta["slice"] = cell.slice;
      meta["method"] = to_string(cell.method);
      meta["R"] = cell.r;
      meta["psnr_db"] = cell.psnr;
      std::ostringstream name;
      name << "recon_s" << std::setw(3) << std::setfill('0') << cell.slice << '_' << to_string(cell.method) << "_R"
           << format_double(cell.r) << "_psnr" << format_double(cell.psnr) << ".kten";
      write_kten(rep.z_final, cfg.output_dir / name.str(), meta);
    }
  } catch (const std::exception &e) {
    row.error = e.what();
  }
  return out;
}

// Emits rows strictly in cell order, flushing whenever the next expected cell
// is available.
class OrderedWriter {
 public:
  OrderedWriter(const std::filesystem::path &csv, const std::filesystem::path *traces, std::size_t cells)
      : pending_(cells), csv_(csv, std::ios::trunc) {
    if (!csv_) throw IoError("cannot write " + csv.string());
    csv_ << csv_header() << '\n' << std::flush;
    if (traces != nullptr) {
      traces_.open(*traces, std::ios::trunc);
      if (!traces_) throw IoError("cannot write " + traces->string());
      traces_ << "slice,method,R,psnr_db,iteration,rmse,chi\n";
    }
  }

  void submit(std::size_t index, CellOutput out) {
    std::lock_guard lock(mutex_);
    pending_[index] = std::move(out);
    while (next_ < pending_.size() && pending_[next_]) {
      const CellOutput &c = *pending_[next_];
      csv_ << to_csv(c.row) << '\n';
      if (traces_.is_open()) {
        const std::size_t n = std::max(c.rmse_trace.size(), c.chi_trace.size());
        for (std::size_t i = 0; i < n; ++i) {
          traces_ << c.row.slice << ',' << to_string(c.row.method) << ',' << format_double(c.row.r) << ','
                  << format_double(c.row.psnr_db) << ',' << i + 1 << ','
                  << format_double(i < c.rmse_trace.size() ? c.rmse_trace[i] : std::nan("")) << ','
                  << format_double(i < c.chi_trace.size() ? c.chi_trace[i] : std::nan("")) << '\n';
        }
        traces_.flush();
      }
      csv_.flush();
      rows_.push_back(c.row);
      pending_[next_].reset();
      ++next_;
    }
  }

  std::vector<ResultRow> take_rows() { return std::move(rows_); }

 private:
  std::mutex mutex_;
  std::vector<std::optional<CellOutput>> pending_;
  std::size_t next_ = 0;
  std::ofstream csv_;
  std::ofstream traces_;
  std::vector<ResultRow> rows_;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig &cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.output_dir);
  const std::vector<KSpaceTensor> truth = load_ground_truth(cfg);

  std::vector<Cell> cells;
  for (int s = 0; s < static_cast<int>(truth.size()); ++s)
    for (const double r : cfg.accelerations)
      for (const double p : cfg.psnr_db)
        for (const Method m : cfg.methods) cells.push_back({s, m, r, p});

  {
    std::ofstream cfg_out(cfg.output_dir / "config.json");
    cfg_out << cfg.to_json().dump(2) << '\n';
  }
  const std::filesystem::path csv = cfg.output_dir / "results.csv";
  const std::filesystem::path traces = cfg.output_dir / "traces.csv";
  OrderedWriter writer(csv, cfg.write_traces ? &traces : nullptr, cells.size());

  const int workers = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
  const auto n = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Cell &c = cells[static_cast<std::size_t>(i)];
    writer.submit(static_cast<std::size_t>(i), run_cell(cfg, c, truth[static_cast<std::size_t>(c.slice)]));
  }
  return {writer.take_rows(), csv};
}

}  // namespace txlr
