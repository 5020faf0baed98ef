#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nfgcover/covers.hpp"
#include "nfgcover/nfg.hpp"

namespace nfgcover {

struct BpOptions {
  int max_iters = 10000;
  double tol = 1e-10;
  /// New message = (1 - damping) * update + damping * old.
  double damping = 0.5;
  std::uint64_t seed = 0;
  /// Extra random initializations beyond the uniform start.
  int restarts = 0;
};

/// Sum-product state of one run. messages[e][k] is the normalized message
/// sent by the factor at the k-th canonical slot of edge e into the edge.
struct BpState {
  std::vector<std::vector<std::vector<double>>> messages;
  int iterations = 0;
  bool converged = false;
  double max_residual = 0.0;
  /// 0 for the uniform start, r for the r-th random restart.
  int start = 0;
};

/// Runs flooding (Jacobi) sum-product from the uniform start and from
/// `restarts` seeded random starts; one state per start.
std::vector<BpState> run_sum_product(const Nfg& nfg, const BpOptions& opts = {});

/// One flooding sweep without damping, returning the residual against the
/// current messages. Used to confirm that a reported fixed point is stable.
double sweep_residual(const Nfg& nfg, const BpState& state);

struct BetheResult {
  double z_bethe = 0.0;
  double free_energy = 0.0;
  std::vector<std::vector<double>> factor_beliefs;
  std::vector<std::vector<double>> edge_beliefs;
  int restarts = 0;
  /// Index of the start whose fixed point gave the minimum free energy.
  int best_start = 0;
  int converged_starts = 0;
};

/// Bethe free energy at a converged state: sum_f sum b_f ln(b_f / f) minus
/// sum over full edges of sum b_e ln b_e; z_bethe = exp(-F).
BetheResult bethe_partition_sum(const Nfg& nfg, const BpState& state);
/// Best (minimum free energy) converged fixed point among the states.
BetheResult bethe_partition_sum(const Nfg& nfg, std::span<const BpState> states);

struct RatioReport {
  double z = 0.0;
  double z_b2 = 0.0;
  double z_b2_census = 0.0;  // NaN when the census was not run
  double z_bethe = 0.0;
  double r1 = 0.0;  // Z / Z_B
  double r2 = 0.0;  // Z / Z_B,2
  double r3 = 0.0;  // Z_B,2 / Z_B
  bool identity_holds = false;
  bool census_agrees = true;
  BetheResult bethe;
  std::vector<BpState> bp;
};

/// Z, Z_B,2 (transform route, cross-checked against the double-cover census
/// when it fits the cap) and Z_B from sum-product, with the three ratios.
RatioReport ratio_report(const Nfg& nfg, const BpOptions& bp = {},
                         const EnumerationOptions& opts = {});

}  // namespace nfgcover
