#pragma once

#include <cstdint>
#include <string>

#include "nfgcover/covers.hpp"
#include "nfgcover/nfg.hpp"

namespace nfgcover {

enum class Topology {
  Cycle,          // `nodes` degree-2 factors in a ring (1 node = self-loop)
  Ladder,         // 2 x `nodes` ladder, degrees 2 and 3
  RandomRegular,  // `nodes` factors of degree `degree`, random pairing
  Tree,           // random recursive tree on `nodes` factors
  Random,         // random degree sequence from the degree-2/3/equality class
};

Topology parse_topology(const std::string& name);
std::string to_string(Topology t);

struct GeneratorSpec {
  std::uint64_t seed = 0;
  Topology topology = Topology::Cycle;
  int nodes = 2;
  int degree = 3;
  /// Random topology: upper bound on the number of edges.
  int max_edges = 6;
  /// Random topology: probability that a node is an equality indicator.
  double equality_fraction = 0.3;
  int max_equality_degree = 4;
  /// Bound on the magnitude of log-domain couplings and fields.
  double strength = 1.0;
  /// Degree-2 factors of the form [a, b, b, a].
  bool symmetric = false;
  /// Emit only log-supermodular factors.
  bool lsm = true;
  int rejection_budget = 10000;
};

Nfg gen_instance(const GeneratorSpec& spec);

/// Binary log-supermodular tensor of the given degree. Degree 3 is drawn by
/// rejection sampling against is_log_supermodular; other degrees are exp of
/// a pairwise energy with non-negative couplings.
DenseTensor random_lsm_tensor(int degree, double strength, Rng& rng,
                              int rejection_budget = 10000);

/// Non-negative binary tensor with independent entries (some exactly zero).
DenseTensor random_tensor(int degree, double strength, Rng& rng);

double uniform01(Rng& rng);

}  // namespace nfgcover
