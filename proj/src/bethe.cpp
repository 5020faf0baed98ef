#include "nfgcover/bethe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nfgcover/error.hpp"
#include "nfgcover/holo.hpp"

namespace nfgcover {

namespace {

using Vec = std::vector<double>;
using Messages = std::vector<std::vector<Vec>>;

// Where factor f's k-th argument attaches: edge index and endpoint index.
struct Attachment {
  std::size_t edge = 0;
  std::size_t endpoint = 0;
};

struct Topology {
  std::vector<std::vector<Attachment>> attach;  // [factor][position]
  std::vector<bool> half;
  std::vector<int> card;
};

Topology make_topology(const Nfg& nfg) {
  Topology topo;
  const auto slots = edge_slots(nfg);
  topo.attach.resize(nfg.factors.size());
  for (std::size_t f = 0; f < nfg.factors.size(); ++f) {
    topo.attach[f].resize(nfg.factors[f].degree());
  }
  for (std::size_t e = 0; e < nfg.edges.size(); ++e) {
    topo.half.push_back(nfg.edges[e].half);
    topo.card.push_back(nfg.edges[e].cardinality);
    for (std::size_t j = 0; j < slots[e].size(); ++j) {
      topo.attach[slots[e][j].factor][slots[e][j].position] = {e, j};
    }
  }
  return topo;
}

bool normalize(Vec& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  if (!(sum > 0.0)) return false;
  for (double& x : v) x /= sum;
  return true;
}

// Message entering factor position (e, j): the opposite endpoint's outgoing
// message, or all ones for a half edge.
const Vec* incoming(const Topology& topo, const Messages& msgs, Attachment a) {
  if (topo.half[a.edge]) return nullptr;
  return &msgs[a.edge][1 - a.endpoint];
}

double in_value(const Vec* v, int symbol) {
  return v == nullptr ? 1.0 : (*v)[static_cast<std::size_t>(symbol)];
}

Messages sweep(const Nfg& nfg, const Topology& topo, const Messages& old) {
  Messages next = old;
  for (std::size_t f = 0; f < nfg.factors.size(); ++f) {
    const DenseTensor& t = nfg.factors[f].tensor;
    const auto& att = topo.attach[f];
    const std::size_t d = att.size();
    std::vector<const Vec*> in(d);
    for (std::size_t k = 0; k < d; ++k) in[k] = incoming(topo, old, att[k]);
    std::vector<Vec> out(d);
    for (std::size_t k = 0; k < d; ++k) {
      out[k].assign(static_cast<std::size_t>(topo.card[att[k].edge]), 0.0);
    }
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      const double v = t[flat];
      if (v == 0.0) continue;
      const std::vector<int> x = t.unravel(flat);
      for (std::size_t k = 0; k < d; ++k) {
        double w = v;
        for (std::size_t k2 = 0; k2 < d; ++k2) {
          if (k2 != k) w *= in_value(in[k2], x[k2]);
        }
        out[k][static_cast<std::size_t>(x[k])] += w;
      }
    }
    for (std::size_t k = 0; k < d; ++k) {
      if (!normalize(out[k])) {
        std::fill(out[k].begin(), out[k].end(), 1.0 / static_cast<double>(out[k].size()));
      }
      next[att[k].edge][att[k].endpoint] = std::move(out[k]);
    }
  }
  return next;
}

double residual(const Messages& a, const Messages& b) {
  double r = 0.0;
  for (std::size_t e = 0; e < a.size(); ++e) {
    for (std::size_t j = 0; j < a[e].size(); ++j) {
      for (std::size_t s = 0; s < a[e][j].size(); ++s) {
        r = std::max(r, std::abs(a[e][j][s] - b[e][j][s]));
      }
    }
  }
  return r;
}

Messages initial_messages(const Topology& topo, Rng* rng) {
  Messages m(topo.card.size());
  for (std::size_t e = 0; e < topo.card.size(); ++e) {
    m[e].resize(topo.half[e] ? 1 : 2);
    for (Vec& v : m[e]) {
      v.assign(static_cast<std::size_t>(topo.card[e]), 1.0);
      if (rng != nullptr) {
        for (double& x : v) {
          x = 0.05 + static_cast<double>((*rng)() >> 11) * 0x1.0p-53;
        }
      }
      normalize(v);
    }
  }
  return m;
}

BpState run_one(const Nfg& nfg, const Topology& topo, const BpOptions& opts,
                Rng* rng, int start) {
  BpState state;
  state.start = start;
  state.messages = initial_messages(topo, rng);
  for (int it = 0; it < opts.max_iters; ++it) {
    Messages next = sweep(nfg, topo, state.messages);
    if (opts.damping > 0.0) {
      for (std::size_t e = 0; e < next.size(); ++e) {
        for (std::size_t j = 0; j < next[e].size(); ++j) {
          for (std::size_t s = 0; s < next[e][j].size(); ++s) {
            next[e][j][s] = (1.0 - opts.damping) * next[e][j][s] +
                            opts.damping * state.messages[e][j][s];
          }
        }
      }
    }
    state.max_residual = residual(next, state.messages);
    state.messages = std::move(next);
    state.iterations = it + 1;
    if (state.max_residual < opts.tol) {
      state.converged = true;
      break;
    }
  }
  return state;
}

}  // namespace

std::vector<BpState> run_sum_product(const Nfg& nfg, const BpOptions& opts) {
  require_valid(nfg);
  if (nfg.is_signed) {
    throw Error(ErrorKind::SignedGraphUnsupported,
                "sum-product needs a non-negative graph");
  }
  if (!(opts.damping >= 0.0 && opts.damping < 1.0)) {
    throw Error(ErrorKind::InvalidGraph, "damping must lie in [0, 1)");
  }
  const Topology topo = make_topology(nfg);
  std::vector<BpState> states;
  states.push_back(run_one(nfg, topo, opts, nullptr, 0));
  Rng rng(opts.seed);
  for (int r = 1; r <= opts.restarts; ++r) {
    states.push_back(run_one(nfg, topo, opts, &rng, r));
  }
  return states;
}

double sweep_residual(const Nfg& nfg, const BpState& state) {
  const Topology topo = make_topology(nfg);
  return residual(sweep(nfg, topo, state.messages), state.messages);
}

BetheResult bethe_partition_sum(const Nfg& nfg, const BpState& state) {
  if (!state.converged) {
    throw Error(ErrorKind::NotConverged,
                "sum-product did not converge (residual " +
                    std::to_string(state.max_residual) + ")");
  }
  const Topology topo = make_topology(nfg);
  BetheResult result;
  double energy = 0.0;
  for (std::size_t f = 0; f < nfg.factors.size(); ++f) {
    const DenseTensor& t = nfg.factors[f].tensor;
    const auto& att = topo.attach[f];
    Vec belief(t.size(), 0.0);
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      if (t[flat] == 0.0) continue;
      const std::vector<int> x = t.unravel(flat);
      double w = t[flat];
      for (std::size_t k = 0; k < att.size(); ++k) {
        w *= in_value(incoming(topo, state.messages, att[k]), x[k]);
      }
      belief[flat] = w;
    }
    if (!normalize(belief)) {
      throw Error(ErrorKind::ZeroSupportBelief,
                  "belief of factor '" + nfg.factors[f].id + "' has empty support");
    }
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      if (belief[flat] > 0.0) energy += belief[flat] * std::log(belief[flat] / t[flat]);
    }
    result.factor_beliefs.push_back(std::move(belief));
  }
  for (std::size_t e = 0; e < nfg.edges.size(); ++e) {
    Vec belief(static_cast<std::size_t>(topo.card[e]), 1.0);
    for (const Vec& m : state.messages[e]) {
      for (std::size_t s = 0; s < belief.size(); ++s) belief[s] *= m[s];
    }
    if (!normalize(belief)) {
      throw Error(ErrorKind::ZeroSupportBelief,
                  "belief of edge '" + nfg.edges[e].id + "' has empty support");
    }
    if (!topo.half[e]) {
      for (double b : belief) {
        if (b > 0.0) energy -= b * std::log(b);
      }
    }
    result.edge_beliefs.push_back(std::move(belief));
  }
  result.free_energy = energy;
  result.z_bethe = std::exp(-energy);
  result.best_start = state.start;
  result.converged_starts = 1;
  return result;
}

BetheResult bethe_partition_sum(const Nfg& nfg, std::span<const BpState> states) {
  BetheResult best;
  bool found = false;
  int converged = 0;
  for (const BpState& s : states) {
    if (!s.converged) continue;
    ++converged;
    BetheResult r = bethe_partition_sum(nfg, s);
    if (!found || r.free_energy < best.free_energy) {
      best = std::move(r);
      found = true;
    }
  }
  if (!found) {
    throw Error(ErrorKind::NotConverged, "no sum-product start converged");
  }
  best.restarts = static_cast<int>(states.size()) - 1;
  best.converged_starts = converged;
  return best;
}

RatioReport ratio_report(const Nfg& nfg, const BpOptions& bp,
                         const EnumerationOptions& opts) {
  RatioReport rep;
  rep.z = partition_sum(nfg, opts);
  rep.z_b2 = bethe2_via_transform(nfg, opts);
  rep.z_b2_census = std::numeric_limits<double>::quiet_NaN();
  try {
    CoverOptions co;
    co.enumeration = opts;
    rep.z_b2_census = bethe_m(nfg, 2, co).value;
    rep.census_agrees =
        std::abs(rep.z_b2_census - rep.z_b2) <= 1e-9 * std::abs(rep.z_b2) + 1e-12;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EnumerationCapExceeded) throw;
  }
  rep.bp = run_sum_product(nfg, bp);
  rep.bethe = bethe_partition_sum(nfg, rep.bp);
  rep.z_bethe = rep.bethe.z_bethe;
  rep.r1 = rep.z / rep.z_bethe;
  rep.r2 = rep.z / rep.z_b2;
  rep.r3 = rep.z_b2 / rep.z_bethe;
  rep.identity_holds = std::abs(rep.r1 - rep.r2 * rep.r3) <= 1e-9 * std::abs(rep.r1);
  return rep;
}

}  // namespace nfgcover
