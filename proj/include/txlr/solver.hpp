#pragma once

#include <optional>
#include <string>
#include <vector>

#include "txlr/sampling.hpp"
#include "txlr/tensor.hpp"
#include "txlr/unfold.hpp"

namespace txlr {

enum class Method { VC, PRIMO, TxLR };
enum class Stopping { FixedIterations, ChiSquare };
enum class StopReason { IterCap, ChiSquare };

std::string to_string(Method m);
std::string to_string(Stopping s);
std::string to_string(StopReason s);
Method parse_method(const std::string &text);
Stopping parse_stopping(const std::string &text);

/// Rank budgets: r0 for the virtual-coil unfolding, r1 for Tc, r2 for Rc.
struct Ranks {
  Index r0 = 50;
  Index r1 = 50;
  Index r2 = 50;
};

struct SolverConfig {
  Method method = Method::TxLR;
  Kernel kernel{5, 5};
  Ranks ranks{};
  int max_iters = 50;
  double rho0 = 1e-6;
  double tau = 1.1;
  double alpha = 1.5;
  Stopping stopping = Stopping::FixedIterations;

  /// Defaults for a method: 50 iterations for TxLR, 100 for VC and PRIMO.
  static SolverConfig defaults(Method m);

  /// Unfoldings constrained by the method, with their rank budgets.
  [[nodiscard]] std::vector<std::pair<Unfolding, Index>> constraints() const;
  /// Constraints actually applied to data of these dims: with a single
  /// transmit mode TxLR keeps only the Rc term.
  [[nodiscard]] std::vector<std::pair<Unfolding, Index>> constraints(const Dims4 &dims) const;

  /// Throws ConfigError unless every rank fits its unfolding for data of
  /// these dims and the scalar parameters are in range.
  void validate(const Dims4 &dims) const;
};

/// One consensus term of the data-consistency step: the (relaxed) low-rank
/// estimate X_i and the scaled dual psi_i, both in unfolded layout.
struct ConsensusTerm {
  Unfolding unfolding;
  const Matrix &x;
  const Matrix &psi;
};

/// Exact minimiser over z of
///   1/2 ||M z - D||^2 + rho/2 sum_i ||X_i + psi_i - U_i(T(z))||^2,
/// i.e. z = (M D + rho sum_i T*(U_i*(X_i + psi_i))) / (M + n rho c) with c the
/// multiplicity map and n the number of terms.
KSpaceTensor z_update(const KSpaceTensor &d, const SamplingMask &mask, std::span<const ConsensusTerm> terms,
                      double rho, const Kernel &kernel);

/// sum_rx ||M z_rx - D_rx||^2 / sigma_rx^2, divided by the number of sampled
/// entries. Throws ConfigError if nothing is sampled or a sigma is not > 0.
double chi_square_stat(const KSpaceTensor &z, const KSpaceTensor &d, const SamplingMask &mask,
                       const NoiseModel &noise);

struct ReconReport {
  KSpaceTensor z_final;
  int iterations_used = 0;
  StopReason stop_reason = StopReason::IterCap;
  std::vector<double> chi_trace;       ///< empty without a noise model
  std::vector<double> rmse_trace;      ///< empty without ground truth
  std::vector<double> residual_trace;  ///< ||M z - D|| per iteration
  /// Iterations (after the fifth) where the data residual increased.
  int residual_increases = 0;
  double wall_ms = 0.0;
};

struct ReconOptions {
  std::optional<NoiseModel> noise;
  /// When set, rmse_trace is filled against it.
  const KSpaceTensor *ground_truth = nullptr;
};

/// ADMM reconstruction of the hard-rank problem for the configured method.
/// Throws ConfigError for invalid configuration (including ChiSquare stopping
/// without a noise model) and DivergenceError if the data residual blows up.
ReconReport admm_reconstruct(const KSpaceTensor &d, const SamplingMask &mask, const SolverConfig &cfg,
                             const ReconOptions &opts = {});

}  // namespace txlr
