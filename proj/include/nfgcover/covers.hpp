#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nfgcover/nfg.hpp"

namespace nfgcover {

/// An M-cover: one permutation of {0..M-1} per full edge. For edge e with
/// canonical endpoints (first slot, second slot), copy i of the first
/// endpoint is joined to copy perms[e][i] of the second.
struct CoverSpec {
  int M = 1;
  std::map<std::string, std::vector<int>> perms;

  friend bool operator==(const CoverSpec&, const CoverSpec&) = default;
};

/// Deterministic generator used for every randomized operation.
using Rng = std::mt19937_64;

/// Uniform integer in [0, n) by rejection, independent of the standard
/// library's distribution implementation.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

/// Checks the spec against the base graph; throws HalfEdgePresent,
/// MalformedPermutation or WrongM.
void check_cover_spec(const Nfg& nfg, const CoverSpec& spec);

CoverSpec trivial_cover(const Nfg& nfg, int M);
/// Double cover whose crossed edges are the set bits of mask (bit i = edge i
/// in file order).
CoverSpec double_cover_from_mask(const Nfg& nfg, std::uint64_t mask);
std::uint64_t crossed_mask(const Nfg& nfg, const CoverSpec& spec);

/// Cover factor copy c of base factor f is named "f#c", cover edge copy i of
/// base edge e is "e#i". Factors are emitted copy-major: all copy-0 factors
/// in base order, then copy 1, ...
Nfg build_cover(const Nfg& nfg, const CoverSpec& spec);

/// Calls visit for each of the 2^|E| labeled double covers in increasing
/// crossed-edge bitmask order.
void enumerate_double_covers(
    const Nfg& nfg, const std::function<void(const CoverSpec&)>& visit,
    const EnumerationOptions& opts = {});
std::vector<CoverSpec> all_double_covers(const Nfg& nfg,
                                         const EnumerationOptions& opts = {});

/// Calls visit for each of the (M!)^|E| labeled M-covers.
void enumerate_covers(const Nfg& nfg, int M,
                      const std::function<void(const CoverSpec&)>& visit,
                      const EnumerationOptions& opts = {});

CoverSpec sample_cover(const Nfg& nfg, int M, std::uint64_t seed);
CoverSpec sample_cover(const Nfg& nfg, int M, Rng& rng);

enum class CoverMode { Exact, MonteCarlo };

struct BetheMEstimate {
  int M = 1;
  double value = 0.0;
  CoverMode mode = CoverMode::Exact;
  std::uint64_t samples = 0;
  /// Delta-method estimate of the standard error of value (Monte-Carlo only).
  double stderr_value = 0.0;
  std::uint64_t seed = 0;
  /// Mean of Z over the covers, before the M-th root.
  double mean_z = 0.0;
};

struct CoverOptions {
  CoverMode mode = CoverMode::Exact;
  std::uint64_t samples = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  EnumerationOptions enumeration;
};

BetheMEstimate bethe_m(const Nfg& nfg, int M, const CoverOptions& opts = {});

struct CensusRow {
  std::uint64_t bitmask = 0;
  double z = 0.0;
  double ratio = 0.0;  // z / Z(N)^2
};

/// Partition sum of every double cover, ordered by bitmask regardless of the
/// thread count.
std::vector<CensusRow> double_cover_census(const Nfg& nfg, int threads = 1,
                                           const EnumerationOptions& opts = {});

struct RuozziViolation {
  std::uint64_t index = 0;
  double z = 0.0;
  double ratio = 0.0;
};

struct RuozziReport {
  int M = 1;
  CoverMode mode = CoverMode::Exact;
  std::uint64_t covers_checked = 0;
  double z_base = 0.0;
  double max_ratio = 0.0;
  std::vector<RuozziViolation> violations;

  bool passed() const { return violations.empty(); }
};

/// Checks Z(cover) <= Z(N)^M (1 + 1e-9) over all or sampled M-covers of a
/// binary log-supermodular graph; throws NotLogSupermodular otherwise.
RuozziReport check_ruozzi(const Nfg& nfg, int M, const CoverOptions& opts = {});

}  // namespace nfgcover
