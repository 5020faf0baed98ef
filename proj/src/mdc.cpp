#include "nfgcover/mdc.hpp"

#include <optional>
#include <string>
#include <vector>

#include "nfgcover/error.hpp"

namespace nfgcover {

DenseTensor merge_tensor(const DenseTensor& t) {
  if (!t.all_binary()) {
    throw Error(ErrorKind::NonBinaryAlphabet, "merge needs binary axes");
  }
  const std::size_t d = t.arity();
  DenseTensor out = DenseTensor::zeros(std::vector<int>(d, 4));
  std::vector<int> first(d);
  std::vector<int> second(d);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const std::vector<int> pairs = out.unravel(flat);
    for (std::size_t k = 0; k < d; ++k) {
      first[k] = pairs[k] >> 1;
      second[k] = pairs[k] & 1;
    }
    out.set_flat(flat, t.at(first) * t.at(second));
  }
  return out;
}

DenseTensor crossing_tensor() {
  DenseTensor out = DenseTensor::zeros({4, 4, 2});
  constexpr int swap[4] = {0, 2, 1, 3};
  for (int i = 0; i < 4; ++i) {
    const int nocross[3] = {i, i, 0};
    const int cross[3] = {i, swap[i], 1};
    out.set(nocross, 1.0);
    out.set(cross, 1.0);
  }
  return out;
}

namespace {

// Without a cover spec every switch factor gets weights [1/2, 1/2].
MdcResult build(const Nfg& nfg, const std::optional<CoverSpec>& spec) {
  require_valid(nfg);
  if (nfg.has_half_edges()) {
    throw Error(ErrorKind::HalfEdgePresent, "MDC needs a graph without half edges");
  }
  if (!nfg.all_binary()) {
    throw Error(ErrorKind::NonBinaryAlphabet, "MDC needs binary edges");
  }
  if (spec) {
    if (spec->M != 2) {
      throw Error(ErrorKind::WrongM, "MDC is defined for double covers only");
    }
    check_cover_spec(nfg, *spec);
  }

  const auto slots = edge_slots(nfg);
  MdcResult out;
  Nfg& g = out.graph;
  g.name = nfg.name + (spec ? "-mdc" : "-avg-mdc");

  std::vector<std::vector<std::string>> merged_args(nfg.factors.size());
  for (std::size_t f = 0; f < nfg.factors.size(); ++f) {
    merged_args[f].resize(nfg.factors[f].degree());
  }
  for (std::size_t e = 0; e < nfg.edges.size(); ++e) {
    const std::string& id = nfg.edges[e].id;
    const std::string p1 = id + ".p1";
    const std::string p2 = id + ".p2";
    const std::string sw = id + ".s";
    g.edges.push_back({p1, 4, false});
    g.edges.push_back({p2, 4, false});
    g.edges.push_back({sw, 2, false});
    merged_args[slots[e][0].factor][slots[e][0].position] = p1;
    merged_args[slots[e][1].factor][slots[e][1].position] = p2;
    out.map.pair_edge_map[id] = {p1, p2};
    out.map.edge_function_map[id] = {"E~" + id, sw, "S~" + id};
  }

  for (std::size_t f = 0; f < nfg.factors.size(); ++f) {
    const Factor& base = nfg.factors[f];
    const std::string id = "f~" + base.id;
    g.factors.push_back({id, merged_args[f], merge_tensor(base.tensor)});
    out.map.factor_map[base.id] = id;
  }
  for (const Edge& e : nfg.edges) {
    const auto& ids = out.map.edge_function_map.at(e.id);
    const auto& [p1, p2] = out.map.pair_edge_map.at(e.id);
    g.factors.push_back({ids.crossing_factor, {p1, p2, ids.switch_edge},
                         crossing_tensor()});
    std::vector<double> weights{0.5, 0.5};
    if (spec) {
      const bool crossed = spec->perms.at(e.id)[0] == 1;
      weights = crossed ? std::vector<double>{0.0, 1.0}
                        : std::vector<double>{1.0, 0.0};
    }
    g.factors.push_back({ids.switch_factor, {ids.switch_edge},
                         DenseTensor({2}, std::move(weights))});
  }
  return out;
}

}  // namespace

MdcResult build_mdc(const Nfg& nfg, const CoverSpec& spec) {
  return build(nfg, spec);
}

MdcResult build_averaged_mdc(const Nfg& nfg) { return build(nfg, std::nullopt); }

}  // namespace nfgcover
