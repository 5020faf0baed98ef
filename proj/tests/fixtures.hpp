#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "nfgcover/nfg.hpp"

namespace nfgcover::testing {

/// Two binary edges, two factors [2,1,1,2] on (e1, e2).
inline Nfg c2() {
  Nfg n;
  n.name = "C2";
  n.edges = {{"e1", 2, false}, {"e2", 2, false}};
  n.factors = {{"f1", {"e1", "e2"}, DenseTensor({2, 2}, {2, 1, 1, 2})},
               {"f2", {"e1", "e2"}, DenseTensor({2, 2}, {2, 1, 1, 2})}};
  return n;
}

/// One factor whose two arguments are the same edge.
inline Nfg self_loop(std::vector<double> values = {2, 1, 1, 2}) {
  Nfg n;
  n.name = "loop";
  n.edges = {{"e", 2, false}};
  n.factors = {{"f", {"e", "e"}, DenseTensor({2, 2}, std::move(values))}};
  return n;
}

/// Naive reference: enumerates every configuration through global_function,
/// with no ordering or pruning.
inline double brute_force_z(const Nfg& nfg) {
  Configuration config;
  for (const Edge& e : nfg.edges) config[e.id] = 0;
  double z = 0.0;
  while (true) {
    z += global_function(nfg, config);
    std::size_t k = 0;
    for (; k < nfg.edges.size(); ++k) {
      int& v = config[nfg.edges[k].id];
      if (++v < nfg.edges[k].cardinality) break;
      v = 0;
    }
    if (k == nfg.edges.size()) break;
  }
  return z;
}

inline bool rel_close(double a, double b, double rel = 1e-9) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + 1e-12;
}

}  // namespace nfgcover::testing
