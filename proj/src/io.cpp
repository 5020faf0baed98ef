#include "nfgcover/io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <ostream>
#include <sstream>

#include "nfgcover/error.hpp"

namespace nfgcover {

Json nfg_to_json(const Nfg& nfg) {
  Json j;
  j["name"] = nfg.name;
  j["signed"] = nfg.is_signed;
  j["edges"] = Json::array();
  for (const Edge& e : nfg.edges) {
    j["edges"].push_back({{"id", e.id}, {"cardinality", e.cardinality}, {"half", e.half}});
  }
  j["factors"] = Json::array();
  for (const Factor& f : nfg.factors) {
    Json jf{{"id", f.id}, {"args", f.args}};
    if (is_equality_tensor(f.tensor)) {
      jf["kind"] = "equality";
    } else {
      jf["kind"] = "dense";
      jf["values"] = f.tensor.values();
    }
    j["factors"].push_back(std::move(jf));
  }
  return j;
}

Nfg nfg_from_json(const Json& j) {
  try {
    Nfg nfg;
    nfg.name = j.value("name", "");
    nfg.is_signed = j.value("signed", false);
    for (const Json& je : j.at("edges")) {
      nfg.edges.push_back({je.at("id").get<std::string>(),
                           je.value("cardinality", 2), je.value("half", false)});
    }
    for (const Json& jf : j.at("factors")) {
      Factor f;
      f.id = jf.at("id").get<std::string>();
      f.args = jf.at("args").get<std::vector<std::string>>();
      std::vector<int> shape;
      for (const auto& a : f.args) {
        const auto idx = nfg.edge_index(a);
        if (!idx) {
          throw Error(ErrorKind::InvalidGraph,
                      "factor '" + f.id + "' references unknown edge '" + a + "'");
        }
        shape.push_back(nfg.edges[*idx].cardinality);
      }
      const std::string kind = jf.value("kind", "dense");
      if (kind == "equality") {
        if (f.args.empty()) {
          throw Error(ErrorKind::InvalidGraph, "equality factor '" + f.id + "' has no args");
        }
        f.tensor = equality_tensor(static_cast<int>(f.args.size()), shape.front());
      } else if (kind == "dense") {
        f.tensor = DenseTensor(shape, jf.at("values").get<std::vector<double>>());
      } else {
        throw Error(ErrorKind::Io, "unknown factor kind '" + kind + "'");
      }
      nfg.factors.push_back(std::move(f));
    }
    return nfg;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Io, std::string("malformed NFG JSON: ") + e.what());
  }
}

Json cover_to_json(const CoverSpec& spec) {
  Json perms = Json::object();
  for (const auto& [id, p] : spec.perms) perms[id] = p;
  return {{"M", spec.M}, {"perms", perms}};
}

CoverSpec cover_from_json(const Json& j) {
  try {
    CoverSpec spec;
    spec.M = j.at("M").get<int>();
    for (const auto& [id, p] : j.at("perms").items()) {
      spec.perms[id] = p.get<std::vector<int>>();
    }
    return spec;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Io, std::string("malformed cover JSON: ") + e.what());
  }
}

Json construction_map_to_json(const ConstructionMap& map) {
  Json j;
  j["factorMap"] = map.factor_map;
  Json efm = Json::object();
  for (const auto& [id, ids] : map.edge_function_map) {
    efm[id] = {{"crossingFactor", ids.crossing_factor},
               {"switchEdge", ids.switch_edge},
               {"switchFactor", ids.switch_factor}};
  }
  j["edgeFunctionMap"] = efm;
  Json pem = Json::object();
  for (const auto& [id, p] : map.pair_edge_map) pem[id] = {p.first, p.second};
  j["pairEdgeMap"] = pem;
  if (!map.gate_map.empty()) j["gateMap"] = map.gate_map;
  return j;
}

ConstructionMap construction_map_from_json(const Json& j) {
  try {
    ConstructionMap map;
    map.factor_map = j.at("factorMap").get<std::map<std::string, std::string>>();
    for (const auto& [id, v] : j.at("edgeFunctionMap").items()) {
      map.edge_function_map[id] = {v.at("crossingFactor").get<std::string>(),
                                   v.at("switchEdge").get<std::string>(),
                                   v.at("switchFactor").get<std::string>()};
    }
    for (const auto& [id, v] : j.at("pairEdgeMap").items()) {
      map.pair_edge_map[id] = {v.at(0).get<std::string>(), v.at(1).get<std::string>()};
    }
    if (j.contains("gateMap")) {
      map.gate_map = j.at("gateMap").get<std::map<std::string, std::string>>();
    }
    return map;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Io, std::string("malformed construction map: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Io, "cannot parse '" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << text;
}

Nfg load_nfg(const std::string& path) { return nfg_from_json(read_json_file(path)); }

std::string dump_nfg(const Nfg& nfg) { return nfg_to_json(nfg).dump(2) + "\n"; }

void save_nfg(const std::string& path, const Nfg& nfg) {
  write_text_file(path, dump_nfg(nfg));
}

void write_census_csv(std::ostream& out, const std::vector<CensusRow>& rows) {
  out << kCensusHeader << "\n" << "bitmask,Z,ratio\n";
  for (const CensusRow& r : rows) {
    out << fmt::format("{},{},{}\n", r.bitmask, r.z, r.ratio);
  }
}

}  // namespace nfgcover
