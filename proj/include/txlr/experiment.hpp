#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "txlr/phantom.hpp"
#include "txlr/solver.hpp"

namespace txlr {

/// Sweep description. Read from a `key = value` file (see README for the
/// keys); command-line flags override individual keys via set().
struct ExperimentConfig {
  std::string source = "generate";  ///< "generate", a .kten file, or a directory of .kten slices
  int slices = 8;
  Index image_size = 48;
  Index crop = 24;
  Index nrx = 8;
  Index ntx = 8;
  int order = 3;
  double decay = 1.0;
  PhantomKind phantom = PhantomKind::BodyEllipses;

  std::vector<Method> methods{Method::VC, Method::PRIMO, Method::TxLR};
  std::vector<double> accelerations{2, 4, 6, 8};
  std::vector<double> psnr_db{60};
  Kernel kernel{5, 5};
  Ranks ranks{};
  int iters = 0;  ///< 0: 50 for TxLR, 100 for VC and PRIMO
  Stopping stopping = Stopping::FixedIterations;
  std::uint64_t seed = 1;
  bool per_tx_masks = true;
  bool force_dc = true;
  double map_threshold = 0.1;

  std::filesystem::path output_dir = "results";
  int workers = 0;  ///< 0: OpenMP default
  bool save_recons = false;
  bool write_traces = true;

  /// Sets one key from its textual value; throws ConfigError for unknown keys
  /// or malformed values.
  void set(const std::string &key, const std::string &value);
  /// Throws ConfigError if a sweep is empty or a referenced path is missing.
  void validate() const;
  [[nodiscard]] nlohmann::json to_json() const;
  /// Solver settings used for one method of this sweep.
  [[nodiscard]] SolverConfig solver(Method m) const;
};

ExperimentConfig parse_config(std::istream &in);
ExperimentConfig load_config(const std::filesystem::path &path);

/// One sweep cell. Field order is the CSV column order.
struct ResultRow {
  int slice = 0;
  Method method = Method::TxLR;
  double r = 0.0;
  double psnr_db = 0.0;
  Kernel kernel{};
  Index r1 = 0;  ///< rank of the first constraint (VC: r0, PRIMO: Rc, TxLR: Tc)
  Index r2 = 0;  ///< rank of the second constraint (TxLR: Rc), else 0
  int iterations_used = 0;
  StopReason stop_reason = StopReason::IterCap;
  double rmse = 0.0;
  double map_rmse = 0.0;
  double chi_final = 0.0;
  double wall_ms = 0.0;
  std::string error;
};

std::string csv_header();
std::string to_csv(const ResultRow &row);

/// Noise-free ground-truth k-space of one generated slice, already cropped.
struct GeneratedSlice {
  KSpaceTensor kspace;
  SensitivitySet sensitivities;
  RealImage phantom;
  nlohmann::json meta;
};
GeneratedSlice generate_slice(const ExperimentConfig &cfg, int slice);

/// Ground-truth stack the sweep runs on: generated, or loaded from KTEN.
std::vector<KSpaceTensor> load_ground_truth(const ExperimentConfig &cfg);

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::filesystem::path csv_path;
};

/// Runs every (slice, method, R, psnr) cell: crop, mask, add noise,
/// reconstruct, score. Rows are written to <output>/results.csv in cell order
/// as soon as every earlier cell has finished; a failing cell is recorded in
/// the error column and the sweep continues.
ExperimentResult run_experiment(const ExperimentConfig &cfg);

}  // namespace txlr
