#include "nfgcover/covers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "nfgcover/error.hpp"

namespace nfgcover {

std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  while (true) {
    const std::uint64_t r = rng();
    if (r < limit) return r % n;
  }
}

namespace {

void require_no_half_edges(const Nfg& nfg) {
  for (const Edge& e : nfg.edges) {
    if (e.half) {
      throw Error(ErrorKind::HalfEdgePresent,
                  "covers are only defined without half edges; edge '" + e.id +
                      "' is a half edge");
    }
  }
}

bool is_bijection(const std::vector<int>& perm, int M) {
  if (static_cast<int>(perm.size()) != M) return false;
  std::vector<bool> seen(static_cast<std::size_t>(M), false);
  for (int v : perm) {
    if (v < 0 || v >= M || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

std::uint64_t checked_power(std::uint64_t base, std::size_t exp,
                            std::uint64_t cap, const char* what) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && total > cap / base) {
      throw Error(ErrorKind::EnumerationCapExceeded,
                  std::string(what) + " exceeds cap " + std::to_string(cap));
    }
    total *= base;
  }
  if (total > cap) {
    throw Error(ErrorKind::EnumerationCapExceeded,
                std::string(what) + " exceeds cap " + std::to_string(cap));
  }
  return total;
}

std::uint64_t factorial(int M) {
  std::uint64_t f = 1;
  for (int i = 2; i <= M; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

}  // namespace

void check_cover_spec(const Nfg& nfg, const CoverSpec& spec) {
  require_no_half_edges(nfg);
  if (spec.M < 1) {
    throw Error(ErrorKind::WrongM, "cover degree must be >= 1");
  }
  for (const Edge& e : nfg.edges) {
    const auto it = spec.perms.find(e.id);
    if (it == spec.perms.end()) {
      throw Error(ErrorKind::MalformedPermutation,
                  "no permutation for edge '" + e.id + "'");
    }
    if (!is_bijection(it->second, spec.M)) {
      throw Error(ErrorKind::MalformedPermutation,
                  "permutation for edge '" + e.id + "' is not a bijection of {0.." +
                      std::to_string(spec.M - 1) + "}");
    }
  }
  for (const auto& [id, perm] : spec.perms) {
    if (!nfg.edge_index(id)) {
      throw Error(ErrorKind::MalformedPermutation,
                  "permutation given for unknown edge '" + id + "'");
    }
  }
}

CoverSpec trivial_cover(const Nfg& nfg, int M) {
  require_no_half_edges(nfg);
  if (M < 1) throw Error(ErrorKind::WrongM, "cover degree must be >= 1");
  CoverSpec spec{M, {}};
  std::vector<int> identity(static_cast<std::size_t>(M));
  std::iota(identity.begin(), identity.end(), 0);
  for (const Edge& e : nfg.edges) spec.perms[e.id] = identity;
  return spec;
}

CoverSpec double_cover_from_mask(const Nfg& nfg, std::uint64_t mask) {
  CoverSpec spec = trivial_cover(nfg, 2);
  for (std::size_t i = 0; i < nfg.edges.size(); ++i) {
    if ((mask >> i) & 1U) spec.perms[nfg.edges[i].id] = {1, 0};
  }
  return spec;
}

std::uint64_t crossed_mask(const Nfg& nfg, const CoverSpec& spec) {
  if (spec.M != 2) throw Error(ErrorKind::WrongM, "expected a double cover");
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < nfg.edges.size(); ++i) {
    if (spec.perms.at(nfg.edges[i].id)[0] == 1) mask |= std::uint64_t{1} << i;
  }
  return mask;
}

Nfg build_cover(const Nfg& nfg, const CoverSpec& spec) {
  require_valid(nfg);
  check_cover_spec(nfg, spec);
  const auto M = static_cast<std::size_t>(spec.M);
  const auto slots = edge_slots(nfg);

  // attached[f][c][k] = cover edge at slot k of copy c of factor f
  std::vector<std::vector<std::vector<std::string>>> attached(nfg.factors.size());
  for (std::size_t f = 0; f < nfg.factors.size(); ++f) {
    attached[f].assign(M, std::vector<std::string>(nfg.factors[f].degree()));
  }

  Nfg cover;
  cover.name = nfg.name + "-cover" + std::to_string(spec.M);
  cover.is_signed = nfg.is_signed;
  for (std::size_t e = 0; e < nfg.edges.size(); ++e) {
    const Edge& base = nfg.edges[e];
    const auto& perm = spec.perms.at(base.id);
    const Slot first = slots[e][0];
    const Slot second = slots[e][1];
    for (std::size_t i = 0; i < M; ++i) {
      const std::string id = base.id + "#" + std::to_string(i);
      cover.edges.push_back({id, base.cardinality, false});
      attached[first.factor][i][first.position] = id;
      attached[second.factor][static_cast<std::size_t>(perm[i])][second.position] = id;
    }
  }
  for (std::size_t c = 0; c < M; ++c) {
    for (std::size_t f = 0; f < nfg.factors.size(); ++f) {
      const Factor& base = nfg.factors[f];
      cover.factors.push_back(
          {base.id + "#" + std::to_string(c), attached[f][c], base.tensor});
    }
  }
  return cover;
}

void enumerate_double_covers(const Nfg& nfg,
                             const std::function<void(const CoverSpec&)>& visit,
                             const EnumerationOptions& opts) {
  require_no_half_edges(nfg);
  if (nfg.edges.size() >= 64) {
    throw Error(ErrorKind::EnumerationCapExceeded, "too many edges for a bitmask");
  }
  const std::uint64_t count =
      checked_power(2, nfg.edges.size(), opts.cap, "number of double covers");
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    visit(double_cover_from_mask(nfg, mask));
  }
}

std::vector<CoverSpec> all_double_covers(const Nfg& nfg,
                                         const EnumerationOptions& opts) {
  std::vector<CoverSpec> out;
  enumerate_double_covers(
      nfg, [&](const CoverSpec& s) { out.push_back(s); }, opts);
  return out;
}

void enumerate_covers(const Nfg& nfg, int M,
                      const std::function<void(const CoverSpec&)>& visit,
                      const EnumerationOptions& opts) {
  require_no_half_edges(nfg);
  if (M < 1) throw Error(ErrorKind::WrongM, "cover degree must be >= 1");
  if (M > 20) {
    throw Error(ErrorKind::EnumerationCapExceeded, "M! overflows");
  }
  checked_power(factorial(M), nfg.edges.size(), opts.cap, "number of M-covers");

  std::vector<std::vector<int>> perms;
  std::vector<int> p(static_cast<std::size_t>(M));
  std::iota(p.begin(), p.end(), 0);
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));

  const std::size_t n = nfg.edges.size();
  std::vector<std::size_t> digit(n, 0);
  CoverSpec spec{M, {}};
  for (const Edge& e : nfg.edges) spec.perms[e.id] = perms[0];
  while (true) {
    visit(spec);
    std::size_t k = 0;
    while (k < n) {
      if (++digit[k] < perms.size()) {
        spec.perms[nfg.edges[k].id] = perms[digit[k]];
        break;
      }
      digit[k] = 0;
      spec.perms[nfg.edges[k].id] = perms[0];
      ++k;
    }
    if (k == n) break;
  }
}

CoverSpec sample_cover(const Nfg& nfg, int M, Rng& rng) {
  CoverSpec spec = trivial_cover(nfg, M);
  for (const Edge& e : nfg.edges) {
    auto& perm = spec.perms[e.id];
    for (std::size_t i = perm.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_below(rng, i));
      std::swap(perm[i - 1], perm[j]);
    }
  }
  return spec;
}

CoverSpec sample_cover(const Nfg& nfg, int M, std::uint64_t seed) {
  Rng rng(seed);
  return sample_cover(nfg, M, rng);
}

BetheMEstimate bethe_m(const Nfg& nfg, int M, const CoverOptions& opts) {
  require_valid(nfg);
  require_no_half_edges(nfg);
  BetheMEstimate est;
  est.M = M;
  est.mode = opts.mode;
  est.seed = opts.seed;
  if (opts.mode == CoverMode::Exact) {
    double sum = 0.0;
    std::uint64_t count = 0;
    enumerate_covers(
        nfg, M,
        [&](const CoverSpec& spec) {
          sum += partition_sum(build_cover(nfg, spec), opts.enumeration);
          ++count;
        },
        opts.enumeration);
    est.samples = count;
    est.mean_z = sum / static_cast<double>(count);
    est.value = std::pow(est.mean_z, 1.0 / M);
    return est;
  }

  Rng rng(opts.seed);
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t n = 0;
  for (std::uint64_t s = 0; s < opts.samples; ++s) {
    const double z =
        partition_sum(build_cover(nfg, sample_cover(nfg, M, rng)), opts.enumeration);
    ++n;
    const double delta = z - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (z - mean);
  }
  est.samples = n;
  est.mean_z = mean;
  est.value = std::pow(mean, 1.0 / M);
  if (n > 1 && mean > 0.0) {
    const double se_mean = std::sqrt(m2 / static_cast<double>(n - 1) /
                                     static_cast<double>(n));
    est.stderr_value = std::pow(mean, 1.0 / M - 1.0) * se_mean / M;
  }
  return est;
}

std::vector<CensusRow> double_cover_census(const Nfg& nfg, int threads,
                                           const EnumerationOptions& opts) {
  require_valid(nfg);
  const std::vector<CoverSpec> specs = all_double_covers(nfg, opts);
  const double z = partition_sum(nfg, opts);
  const double z2 = z * z;
  std::vector<CensusRow> rows(specs.size());
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < specs.size(); i += step) {
      const double zc = partition_sum(build_cover(nfg, specs[i]), opts);
      rows[i] = {i, zc, z2 == 0.0 ? (zc == 0.0 ? 1.0 : INFINITY) : zc / z2};
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, threads));
  if (n_threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work, t, n_threads);
    for (auto& th : pool) th.join();
  }
  return rows;
}

RuozziReport check_ruozzi(const Nfg& nfg, int M, const CoverOptions& opts) {
  require_valid(nfg);
  require_no_half_edges(nfg);
  if (!nfg.all_binary()) {
    throw Error(ErrorKind::NonBinaryAlphabet, "cover bound check needs binary edges");
  }
  for (const Factor& f : nfg.factors) {
    if (!is_log_supermodular(f.tensor)) {
      throw Error(ErrorKind::NotLogSupermodular,
                  "factor '" + f.id + "' is not log-supermodular");
    }
  }
  RuozziReport report;
  report.M = M;
  report.mode = opts.mode;
  report.z_base = partition_sum(nfg, opts.enumeration);
  const double bound = std::pow(report.z_base, M);
  auto check = [&](const CoverSpec& spec) {
    const double z = partition_sum(build_cover(nfg, spec), opts.enumeration);
    const double ratio = bound == 0.0 ? (z == 0.0 ? 1.0 : INFINITY) : z / bound;
    report.max_ratio = std::max(report.max_ratio, ratio);
    if (z > bound * (1.0 + 1e-9)) {
      report.violations.push_back({report.covers_checked, z, ratio});
    }
    ++report.covers_checked;
  };
  if (opts.mode == CoverMode::Exact) {
    enumerate_covers(nfg, M, check, opts.enumeration);
  } else {
    Rng rng(opts.seed);
    for (std::uint64_t s = 0; s < opts.samples; ++s) check(sample_cover(nfg, M, rng));
  }
  return report;
}

}  // namespace nfgcover
