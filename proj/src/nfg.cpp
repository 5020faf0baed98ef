#include "nfgcover/nfg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <unordered_map>

#include "nfgcover/error.hpp"

namespace nfgcover {

std::optional<std::size_t> Nfg::edge_index(const std::string& id) const {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Nfg::factor_index(const std::string& id) const {
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].id == id) return i;
  }
  return std::nullopt;
}

const Edge& Nfg::edge(const std::string& id) const {
  const auto i = edge_index(id);
  if (!i) throw Error(ErrorKind::InvalidGraph, "unknown edge '" + id + "'");
  return edges[*i];
}

const Factor& Nfg::factor(const std::string& id) const {
  const auto i = factor_index(id);
  if (!i) throw Error(ErrorKind::InvalidGraph, "unknown factor '" + id + "'");
  return factors[*i];
}

bool Nfg::has_half_edges() const {
  return std::any_of(edges.begin(), edges.end(),
                     [](const Edge& e) { return e.half; });
}

bool Nfg::all_binary() const {
  return std::all_of(edges.begin(), edges.end(),
                     [](const Edge& e) { return e.cardinality == 2; });
}

std::vector<std::vector<Slot>> edge_slots(const Nfg& nfg) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nfg.edges.size(); ++i) index[nfg.edges[i].id] = i;
  std::vector<std::vector<Slot>> slots(nfg.edges.size());
  for (std::size_t f = 0; f < nfg.factors.size(); ++f) {
    const auto& args = nfg.factors[f].args;
    for (std::size_t k = 0; k < args.size(); ++k) {
      const auto it = index.find(args[k]);
      if (it != index.end()) slots[it->second].push_back({f, k});
    }
  }
  return slots;
}

std::vector<Diagnostic> validate(const Nfg& nfg) {
  std::vector<Diagnostic> out;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nfg.edges.size(); ++i) {
    const Edge& e = nfg.edges[i];
    if (!index.emplace(e.id, i).second) {
      out.push_back({"unique-edge-id", e.id, "duplicate edge id"});
    }
    if (e.cardinality <= 0) {
      out.push_back({"positive-cardinality", e.id,
                     "cardinality " + std::to_string(e.cardinality)});
    }
  }
  std::set<std::string> factor_ids;
  std::vector<int> refs(nfg.edges.size(), 0);
  for (const Factor& f : nfg.factors) {
    if (!factor_ids.insert(f.id).second) {
      out.push_back({"unique-factor-id", f.id, "duplicate factor id"});
    }
    const auto& shape = f.tensor.shape();
    if (shape.size() != f.args.size()) {
      out.push_back({"arity-mismatch", f.id,
                     "tensor arity " + std::to_string(shape.size()) +
                         " but " + std::to_string(f.args.size()) + " args"});
    }
    for (std::size_t k = 0; k < f.args.size(); ++k) {
      const auto it = index.find(f.args[k]);
      if (it == index.end()) {
        out.push_back({"known-edge", f.id, "unknown edge '" + f.args[k] + "'"});
        continue;
      }
      ++refs[it->second];
      if (k < shape.size() && shape[k] != nfg.edges[it->second].cardinality) {
        out.push_back({"shape-mismatch", f.id,
                       "axis " + std::to_string(k) + " has size " +
                           std::to_string(shape[k]) + " but edge '" +
                           f.args[k] + "' has cardinality " +
                           std::to_string(nfg.edges[it->second].cardinality)});
      }
    }
    if (!nfg.is_signed) {
      for (double v : f.tensor.values()) {
        if (v < 0.0) {
          out.push_back({"non-negative-values", f.id,
                         "negative entry in unsigned graph"});
          break;
        }
      }
    }
  }
  for (std::size_t i = 0; i < nfg.edges.size(); ++i) {
    const int expected = nfg.edges[i].half ? 1 : 2;
    if (refs[i] != expected) {
      out.push_back({"edge-reference-count", nfg.edges[i].id,
                     "referenced " + std::to_string(refs[i]) +
                         " times, expected " + std::to_string(expected)});
    }
  }
  return out;
}

void require_valid(const Nfg& nfg) {
  const auto diags = validate(nfg);
  if (!diags.empty()) {
    throw Error(ErrorKind::InvalidGraph,
                diags.front().invariant + " at '" + diags.front().element +
                    "': " + diags.front().message);
  }
}

double global_function(const Nfg& nfg, const Configuration& config) {
  double g = 1.0;
  std::vector<int> index;
  for (const Factor& f : nfg.factors) {
    index.clear();
    for (const auto& arg : f.args) {
      const auto it = config.find(arg);
      if (it == config.end()) {
        throw Error(ErrorKind::MissingEdgeAssignment,
                    "no value for edge '" + arg + "'");
      }
      if (it->second < 0 || it->second >= nfg.edge(arg).cardinality) {
        throw Error(ErrorKind::InvalidGraph,
                    "symbol out of range for edge '" + arg + "'");
      }
      index.push_back(it->second);
    }
    g *= f.tensor.at(index);
  }
  return g;
}

SignedLog SignedLog::from(double v) {
  if (v == 0.0) return {};
  return {v > 0.0 ? 1 : -1, std::log(std::abs(v))};
}

double SignedLog::value() const {
  return sign == 0 ? 0.0 : sign * std::exp(log_abs);
}

SignedLog& SignedLog::operator+=(const SignedLog& other) {
  if (other.sign == 0) return *this;
  if (sign == 0) {
    *this = other;
    return *this;
  }
  const double hi = std::max(log_abs, other.log_abs);
  const double gap = -std::abs(log_abs - other.log_abs);
  if (sign == other.sign) {
    log_abs = hi + std::log1p(std::exp(gap));
    return *this;
  }
  if (gap == 0.0) {
    *this = {};
    return *this;
  }
  sign = log_abs > other.log_abs ? sign : other.sign;
  log_abs = hi + std::log1p(-std::exp(gap));
  return *this;
}

namespace {

/// Enumeration schedule: the order in which edges are assigned and, for each
/// depth, the factors whose last argument is fixed there.
struct Plan {
  std::vector<std::size_t> order;
  std::vector<int> cardinality;
  std::vector<std::vector<std::size_t>> completes_at;
  std::vector<std::size_t> constant_factors;
  std::vector<std::vector<std::size_t>> arg_edges;
};

Plan make_plan(const Nfg& nfg) {
  Plan plan;
  const std::size_t n_edges = nfg.edges.size();
  const std::size_t n_factors = nfg.factors.size();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n_edges; ++i) {
    index[nfg.edges[i].id] = i;
    plan.cardinality.push_back(nfg.edges[i].cardinality);
  }
  plan.arg_edges.resize(n_factors);
  std::vector<std::set<std::size_t>> pending(n_factors);
  std::vector<std::vector<std::size_t>> incident(n_edges);
  for (std::size_t f = 0; f < n_factors; ++f) {
    for (const auto& a : nfg.factors[f].args) {
      const std::size_t e = index.at(a);
      plan.arg_edges[f].push_back(e);
      if (pending[f].insert(e).second) incident[e].push_back(f);
    }
    if (pending[f].empty()) plan.constant_factors.push_back(f);
  }
  std::vector<std::size_t> distinct(n_factors);
  for (std::size_t f = 0; f < n_factors; ++f) distinct[f] = pending[f].size();

  // Greedy order: prefer edges that complete many factors, then edges that
  // touch partially assigned factors, then file order.
  std::vector<bool> assigned(n_edges, false);
  plan.completes_at.resize(n_edges);
  for (std::size_t depth = 0; depth < n_edges; ++depth) {
    std::size_t best = n_edges;
    int best_complete = -1;
    int best_touch = -1;
    for (std::size_t e = 0; e < n_edges; ++e) {
      if (assigned[e]) continue;
      int complete = 0;
      int touch = 0;
      for (std::size_t f : incident[e]) {
        if (pending[f].size() == 1) ++complete;
        if (pending[f].size() < distinct[f]) ++touch;
      }
      if (complete > best_complete ||
          (complete == best_complete && touch > best_touch)) {
        best = e;
        best_complete = complete;
        best_touch = touch;
      }
    }
    assigned[best] = true;
    plan.order.push_back(best);
    for (std::size_t f : incident[best]) {
      pending[f].erase(best);
      if (pending[f].empty()) plan.completes_at[depth].push_back(f);
    }
  }
  return plan;
}

struct LinearRing {
  using Value = double;
  static Value one() { return 1.0; }
  static Value mul(Value a, double v) { return a * v; }
  static bool zero(Value a) { return a == 0.0; }
  static void add(Value& acc, Value a) { acc += a; }
};

struct LogRing {
  using Value = SignedLog;
  static Value one() { return {1, 0.0}; }
  static Value mul(Value a, double v) {
    if (v == 0.0) return {};
    return {v > 0.0 ? a.sign : -a.sign, a.log_abs + std::log(std::abs(v))};
  }
  static bool zero(const Value& a) { return a.sign == 0; }
  static void add(Value& acc, const Value& a) { acc += a; }
};

template <class Ring>
typename Ring::Value enumerate(const Nfg& nfg, const EnumerationOptions& opts) {
  require_valid(nfg);
  const Plan plan = make_plan(nfg);
  using V = typename Ring::Value;

  std::vector<int> value(nfg.edges.size(), 0);
  auto factor_value = [&](std::size_t f) {
    const auto& shape = nfg.factors[f].tensor.shape();
    std::size_t flat = 0;
    const auto& args = plan.arg_edges[f];
    for (std::size_t k = 0; k < args.size(); ++k) {
      flat = flat * static_cast<std::size_t>(shape[k]) +
             static_cast<std::size_t>(value[args[k]]);
    }
    return nfg.factors[f].tensor[flat];
  };

  V base = Ring::one();
  for (std::size_t f : plan.constant_factors) base = Ring::mul(base, factor_value(f));
  V sum{};
  if (Ring::zero(base)) return sum;
  const std::size_t n = plan.order.size();
  if (n == 0) return base;

  std::vector<V> partial(n + 1);
  partial[0] = base;
  std::uint64_t visited = 0;
  std::size_t depth = 0;
  value[plan.order[0]] = -1;
  while (true) {
    const std::size_t e = plan.order[depth];
    if (++value[e] >= plan.cardinality[e]) {
      if (depth == 0) break;
      --depth;
      continue;
    }
    if (++visited > opts.cap) {
      throw Error(ErrorKind::EnumerationCapExceeded,
                  "more than " + std::to_string(opts.cap) +
                      " enumeration steps for '" + nfg.name + "'");
    }
    V p = partial[depth];
    for (std::size_t f : plan.completes_at[depth]) {
      p = Ring::mul(p, factor_value(f));
      if (Ring::zero(p)) break;
    }
    if (Ring::zero(p)) continue;
    if (depth + 1 == n) {
      Ring::add(sum, p);
      continue;
    }
    partial[++depth] = p;
    value[plan.order[depth]] = -1;
  }
  return sum;
}

}  // namespace

double partition_sum(const Nfg& nfg, const EnumerationOptions& opts) {
  return enumerate<LinearRing>(nfg, opts);
}

SignedLog partition_sum_log(const Nfg& nfg, const EnumerationOptions& opts) {
  return enumerate<LogRing>(nfg, opts);
}

Matrix2 matrix_of(const DenseTensor& t) {
  if (t.arity() != 2) {
    throw Error(ErrorKind::WrongArity,
                "expected 2 arguments, got " + std::to_string(t.arity()));
  }
  if (!t.all_binary()) {
    throw Error(ErrorKind::WrongCardinality, "expected binary arguments");
  }
  return {{{t[0], t[1]}, {t[2], t[3]}}};
}

Matrix2 matrix_of(const Factor& f) { return matrix_of(f.tensor); }

double det_of(const Matrix2& m) { return m[0][0] * m[1][1] - m[1][0] * m[0][1]; }

double perm_of(const Matrix2& m) { return m[0][0] * m[1][1] + m[1][0] * m[0][1]; }

namespace {

// With binary axes the flat index is a bit vector (axis 0 = most significant
// bit), so componentwise min/max are bitwise and/or.
bool lattice_check(const DenseTensor& t, bool super) {
  if (!t.all_binary()) {
    throw Error(ErrorKind::NonBinaryAlphabet,
                "log-supermodularity needs binary arguments");
  }
  const double m = t.max_abs();
  const double slack = 1e-12 * m * m;
  const std::size_t n = t.size();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      const double lhs = t[x] * t[y];
      const double rhs = t[x & y] * t[x | y];
      if (super ? lhs > rhs + slack : lhs < rhs - slack) return false;
    }
  }
  return true;
}

}  // namespace

bool is_log_supermodular(const DenseTensor& t) { return lattice_check(t, true); }

bool is_log_submodular(const DenseTensor& t) { return lattice_check(t, false); }

DenseTensor equality_tensor(int degree, int cardinality) {
  if (degree < 1 || cardinality < 1) {
    throw Error(ErrorKind::InvalidTensor, "equality tensor needs degree >= 1");
  }
  DenseTensor t = DenseTensor::zeros(
      std::vector<int>(static_cast<std::size_t>(degree), cardinality));
  std::vector<int> idx(static_cast<std::size_t>(degree));
  for (int s = 0; s < cardinality; ++s) {
    std::fill(idx.begin(), idx.end(), s);
    t.set(idx, 1.0);
  }
  return t;
}

bool is_equality_tensor(const DenseTensor& t) {
  if (t.arity() == 0) return false;
  const int card = t.shape().front();
  for (int s : t.shape()) {
    if (s != card) return false;
  }
  return t == equality_tensor(static_cast<int>(t.arity()), card);
}

}  // namespace nfgcover
