#pragma once

#include <map>
#include <string>
#include <utility>

#include "nfgcover/covers.hpp"
#include "nfgcover/nfg.hpp"

namespace nfgcover {

/// Pair-alphabet symbol for the two copies of a binary variable:
/// index = 2 * (copy-0 bit) + (copy-1 bit), i.e. (0,0),(0,1),(1,0),(1,1).
constexpr int pair_index(int first, int second) { return 2 * first + second; }

struct EdgeFunctionIds {
  std::string crossing_factor;  // E~_e
  std::string switch_edge;
  std::string switch_factor;    // f~_{e,s}

  friend bool operator==(const EdgeFunctionIds&, const EdgeFunctionIds&) = default;
};

/// Provenance from base graph elements to constructed elements.
struct ConstructionMap {
  std::map<std::string, std::string> factor_map;
  std::map<std::string, EdgeFunctionIds> edge_function_map;
  /// Pair edges toward the first and the second canonical endpoint.
  std::map<std::string, std::pair<std::string, std::string>> pair_edge_map;
  /// Filled by the holographic transform: base edge -> gate factor id.
  std::map<std::string, std::string> gate_map;

  friend bool operator==(const ConstructionMap&, const ConstructionMap&) = default;
};

struct MdcResult {
  Nfg graph;
  ConstructionMap map;
};

/// Merged tensor over the pair alphabet: f~(p_1..p_d) = f(first bits) *
/// f(second bits). Requires binary axes.
DenseTensor merge_tensor(const DenseTensor& t);

/// 4x4x2 value table of E~_e: identity at switch 0, the (0,1)<->(1,0) swap
/// at switch 1.
DenseTensor crossing_tensor();

/// Merged double cover NFG of the double cover given by spec.
MdcResult build_mdc(const Nfg& nfg, const CoverSpec& spec);
/// Same graph with every switch factor equal to [1/2, 1/2].
MdcResult build_averaged_mdc(const Nfg& nfg);

}  // namespace nfgcover
