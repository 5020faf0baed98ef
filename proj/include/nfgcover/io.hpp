#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nfgcover/covers.hpp"
#include "nfgcover/mdc.hpp"
#include "nfgcover/nfg.hpp"

namespace nfgcover {

using Json = nlohmann::json;

// NFG file: {"name", "edges": [{"id","cardinality","half"}], "signed",
// "factors": [{"id","args","kind": "dense"|"equality","values"}]}.
// Factors whose table is exactly an equality indicator are written as
// "equality". Doubles use the shortest representation that round-trips.
Json nfg_to_json(const Nfg& nfg);
Nfg nfg_from_json(const Json& j);

// Cover file: {"M": int, "perms": {edge id: [ints]}}.
Json cover_to_json(const CoverSpec& spec);
CoverSpec cover_from_json(const Json& j);

Json construction_map_to_json(const ConstructionMap& map);
ConstructionMap construction_map_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

Nfg load_nfg(const std::string& path);
void save_nfg(const std::string& path, const Nfg& nfg);
std::string dump_nfg(const Nfg& nfg);

/// Frozen census schema, version line first.
inline constexpr const char* kCensusHeader = "# nfgcover census v1";
void write_census_csv(std::ostream& out, const std::vector<CensusRow>& rows);

}  // namespace nfgcover
