#include "nfgcover/generate.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "nfgcover/error.hpp"

namespace nfgcover {

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

namespace {

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

// exp(sum_{i<j} J_ij x_i x_j + sum_i h_i x_i + noise(x)) with J_ij >= 0.
DenseTensor pairwise_tensor(int degree, double strength, double noise, Rng& rng) {
  const auto d = static_cast<std::size_t>(degree);
  std::vector<double> h(d);
  std::vector<std::vector<double>> J(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    h[i] = uniform(rng, -strength, strength);
    for (std::size_t k = i + 1; k < d; ++k) J[i][k] = uniform(rng, 0.0, strength);
  }
  const std::size_t n = std::size_t{1} << d;
  std::vector<double> values(n);
  for (std::size_t flat = 0; flat < n; ++flat) {
    double energy = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const bool xi = (flat >> (d - 1 - i)) & 1U;
      if (!xi) continue;
      energy += h[i];
      for (std::size_t k = i + 1; k < d; ++k) {
        if ((flat >> (d - 1 - k)) & 1U) energy += J[i][k];
      }
    }
    if (noise > 0.0) energy += uniform(rng, -noise, noise);
    values[flat] = std::exp(energy);
  }
  return DenseTensor(std::vector<int>(d, 2), std::move(values));
}

struct Skeleton {
  std::vector<int> degrees;
  std::vector<bool> equality;
  // Each edge joins (factor, slot) to (factor, slot).
  std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> edges;
};

void pair_stubs(Skeleton& sk, Rng& rng) {
  std::vector<std::pair<int, int>> stubs;
  for (int f = 0; f < static_cast<int>(sk.degrees.size()); ++f) {
    for (int s = 0; s < sk.degrees[static_cast<std::size_t>(f)]; ++s) stubs.emplace_back(f, s);
  }
  for (std::size_t i = stubs.size(); i > 1; --i) {
    std::swap(stubs[i - 1], stubs[uniform_below(rng, i)]);
  }
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
    auto a = stubs[i];
    auto b = stubs[i + 1];
    if (b < a) std::swap(a, b);
    sk.edges.push_back({a, b});
  }
}

Skeleton make_skeleton(const GeneratorSpec& spec, Rng& rng) {
  Skeleton sk;
  const int n = spec.nodes;
  auto unrealizable = [](const std::string& why) {
    throw Error(ErrorKind::UnrealizableTopology, why);
  };
  switch (spec.topology) {
    case Topology::Cycle: {
      if (n < 1) unrealizable("cycle needs at least one node");
      sk.degrees.assign(static_cast<std::size_t>(n), 2);
      for (int i = 0; i < n; ++i) sk.edges.push_back({{i, 1}, {(i + 1) % n, 0}});
      break;
    }
    case Topology::Ladder: {
      if (n < 2) unrealizable("ladder needs at least two rungs");
      sk.degrees.assign(static_cast<std::size_t>(2 * n), 0);
      auto connect = [&](int a, int b) {
        sk.edges.push_back({{a, sk.degrees[static_cast<std::size_t>(a)]++},
                            {b, sk.degrees[static_cast<std::size_t>(b)]++}});
      };
      for (int i = 0; i < n; ++i) {
        connect(i, n + i);
        if (i + 1 < n) {
          connect(i, i + 1);
          connect(n + i, n + i + 1);
        }
      }
      break;
    }
    case Topology::RandomRegular: {
      if (n < 1 || spec.degree < 1 || (n * spec.degree) % 2 != 0) {
        unrealizable("random-regular needs nodes * degree even");
      }
      sk.degrees.assign(static_cast<std::size_t>(n), spec.degree);
      pair_stubs(sk, rng);
      break;
    }
    case Topology::Tree: {
      if (n < 2) unrealizable("tree needs at least two nodes");
      sk.degrees.assign(static_cast<std::size_t>(n), 0);
      for (int i = 1; i < n; ++i) {
        const int parent = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(i)));
        sk.edges.push_back({{parent, sk.degrees[static_cast<std::size_t>(parent)]++},
                            {i, sk.degrees[static_cast<std::size_t>(i)]++}});
      }
      break;
    }
    case Topology::Random: {
      if (n < 1) unrealizable("random topology needs at least one node");
      bool ok = false;
      for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
        sk.degrees.assign(static_cast<std::size_t>(n), 0);
        sk.equality.assign(static_cast<std::size_t>(n), false);
        int total = 0;
        for (int i = 0; i < n; ++i) {
          const auto u = static_cast<std::size_t>(i);
          if (spec.max_equality_degree >= 2 && uniform01(rng) < spec.equality_fraction) {
            sk.equality[u] = true;
            sk.degrees[u] = 2 + static_cast<int>(uniform_below(
                                    rng, static_cast<std::uint64_t>(spec.max_equality_degree - 1)));
          } else {
            sk.degrees[u] = 2 + static_cast<int>(uniform_below(rng, 2));
          }
          total += sk.degrees[u];
        }
        ok = total % 2 == 0 && total / 2 <= spec.max_edges;
      }
      if (!ok) unrealizable("no degree sequence fits the edge budget");
      pair_stubs(sk, rng);
      break;
    }
  }
  sk.equality.resize(sk.degrees.size(), false);
  return sk;
}

}  // namespace

Topology parse_topology(const std::string& name) {
  if (name == "cycle") return Topology::Cycle;
  if (name == "ladder") return Topology::Ladder;
  if (name == "random-regular") return Topology::RandomRegular;
  if (name == "tree") return Topology::Tree;
  if (name == "random") return Topology::Random;
  throw Error(ErrorKind::UnrealizableTopology, "unknown topology '" + name + "'");
}

std::string to_string(Topology t) {
  switch (t) {
    case Topology::Cycle: return "cycle";
    case Topology::Ladder: return "ladder";
    case Topology::RandomRegular: return "random-regular";
    case Topology::Tree: return "tree";
    case Topology::Random: return "random";
  }
  return "unknown";
}

DenseTensor random_lsm_tensor(int degree, double strength, Rng& rng, int rejection_budget) {
  if (degree == 3) {
    for (int attempt = 0; attempt < rejection_budget; ++attempt) {
      DenseTensor t = pairwise_tensor(3, strength, 0.5 * strength, rng);
      if (is_log_supermodular(t)) return t;
    }
    throw Error(ErrorKind::RejectionBudgetExhausted,
                "no log-supermodular degree-3 tensor within the budget");
  }
  DenseTensor t = pairwise_tensor(degree, strength, 0.0, rng);
  if (!is_log_supermodular(t)) {
    throw Error(ErrorKind::NotLogSupermodular, "pairwise tensor failed certification");
  }
  return t;
}

DenseTensor random_tensor(int degree, double strength, Rng& rng) {
  const std::size_t n = std::size_t{1} << degree;
  std::vector<double> values(n);
  for (double& v : values) {
    v = uniform01(rng) < 0.1 ? 0.0 : std::exp(uniform(rng, -strength, strength));
  }
  return DenseTensor(std::vector<int>(static_cast<std::size_t>(degree), 2), std::move(values));
}

Nfg gen_instance(const GeneratorSpec& spec) {
  Rng rng(spec.seed);
  const Skeleton sk = make_skeleton(spec, rng);
  Nfg nfg;
  nfg.name = to_string(spec.topology) + "-" + std::to_string(spec.seed);
  std::vector<std::vector<std::string>> args(sk.degrees.size());
  for (std::size_t f = 0; f < sk.degrees.size(); ++f) {
    args[f].resize(static_cast<std::size_t>(sk.degrees[f]));
  }
  for (std::size_t e = 0; e < sk.edges.size(); ++e) {
    const std::string id = "e" + std::to_string(e + 1);
    nfg.edges.push_back({id, 2, false});
    const auto& [a, b] = sk.edges[e];
    args[static_cast<std::size_t>(a.first)][static_cast<std::size_t>(a.second)] = id;
    args[static_cast<std::size_t>(b.first)][static_cast<std::size_t>(b.second)] = id;
  }
  for (std::size_t f = 0; f < sk.degrees.size(); ++f) {
    const int d = sk.degrees[f];
    DenseTensor t;
    if (sk.equality[f]) {
      t = equality_tensor(d);
    } else if (spec.symmetric && d == 2) {
      const double J = uniform(rng, 0.0, spec.strength);
      const double a = std::exp(J);
      const double b = spec.lsm ? 1.0 : std::exp(uniform(rng, 0.0, 2.0 * spec.strength));
      t = DenseTensor({2, 2}, {a, b, b, a});
    } else if (spec.lsm) {
      t = random_lsm_tensor(d, spec.strength, rng, spec.rejection_budget);
    } else {
      t = random_tensor(d, spec.strength, rng);
    }
    if (spec.lsm && !is_log_supermodular(t)) {
      throw Error(ErrorKind::NotLogSupermodular, "generated factor failed certification");
    }
    nfg.factors.push_back({"f" + std::to_string(f + 1), args[f], std::move(t)});
  }
  require_valid(nfg);
  return nfg;
}

}  // namespace nfgcover
