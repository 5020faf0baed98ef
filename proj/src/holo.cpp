#include "nfgcover/holo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "nfgcover/error.hpp"

namespace nfgcover {

namespace {

const double kGamma = 1.0 / std::sqrt(2.0);
const double kSqrt2 = std::sqrt(2.0);

// Contracts m onto axis `axis` (size 4) of t.
DenseTensor mode_product(const DenseTensor& t, std::size_t axis, const Matrix4& m) {
  const auto& shape = t.shape();
  std::size_t inner = 1;
  for (std::size_t k = axis + 1; k < shape.size(); ++k) {
    inner *= static_cast<std::size_t>(shape[k]);
  }
  const std::size_t outer = t.size() / (4 * inner);
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        const double w = m[i][j];
        if (w == 0.0) continue;
        const std::size_t src = (o * 4 + j) * inner;
        const std::size_t dst = (o * 4 + i) * inner;
        for (std::size_t r = 0; r < inner; ++r) out[dst + r] += w * t[src + r];
      }
    }
  }
  return DenseTensor(shape, std::move(out));
}

void require_binary_degree(const DenseTensor& t, std::size_t degree) {
  if (t.arity() != degree) {
    throw Error(ErrorKind::WrongArity,
                "expected " + std::to_string(degree) + " arguments, got " +
                    std::to_string(t.arity()));
  }
  if (!t.all_binary()) {
    throw Error(ErrorKind::WrongCardinality, "expected binary arguments");
  }
}

}  // namespace

const Matrix4& phi_matrix() {
  static const Matrix4 phi{{{1.0, 0.0, 0.0, 0.0},
                            {0.0, kGamma, kGamma, 0.0},
                            {0.0, kGamma, -kGamma, 0.0},
                            {0.0, 0.0, 0.0, 1.0}}};
  return phi;
}

DenseTensor transform_tensor(const DenseTensor& t) {
  for (int s : t.shape()) {
    if (s != 4) {
      throw Error(ErrorKind::WrongCardinality,
                  "transform needs cardinality-4 axes, got " + std::to_string(s));
    }
  }
  DenseTensor out = t;
  for (std::size_t k = 0; k < t.arity(); ++k) out = mode_product(out, k, phi_matrix());
  return out;
}

DenseTensor EdgeGate::to_tensor() const {
  DenseTensor t = DenseTensor::zeros({4, 4});
  for (int i = 0; i < 4; ++i) {
    const int idx[2] = {i, i};
    t.set(idx, diagonal[static_cast<std::size_t>(i)]);
  }
  return t;
}

EdgeGate edge_gate(double p0, double p1) {
  return EdgeGate{{1.0, 1.0, p0 - p1, 1.0}};
}

TransformedNfg transform_mdc(const Nfg& mdc, const ConstructionMap& map) {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::NotAnMdc, why); };
  require_valid(mdc);

  std::set<std::string> covered_factors;
  std::set<std::string> switch_edges;
  TransformedNfg out;
  out.graph.name = mdc.name + "-transformed";
  out.graph.is_signed = true;
  out.map.pair_edge_map = map.pair_edge_map;
  out.map.edge_function_map = map.edge_function_map;

  for (const auto& [base, ids] : map.edge_function_map) {
    const auto pairs = map.pair_edge_map.find(base);
    if (pairs == map.pair_edge_map.end()) fail("no pair edges for '" + base + "'");
    const auto& [p1, p2] = pairs->second;
    for (const auto& id : {p1, p2}) {
      const auto e = mdc.edge_index(id);
      if (!e || mdc.edges[*e].cardinality != 4) fail("pair edge '" + id + "' missing");
    }
    const auto sw = mdc.edge_index(ids.switch_edge);
    if (!sw || mdc.edges[*sw].cardinality != 2) {
      fail("switch edge '" + ids.switch_edge + "' missing");
    }
    const auto cf = mdc.factor_index(ids.crossing_factor);
    const auto sf = mdc.factor_index(ids.switch_factor);
    if (!cf || !sf) fail("crossing or switch factor of '" + base + "' missing");
    const Factor& crossing = mdc.factors[*cf];
    const Factor& switcher = mdc.factors[*sf];
    if (crossing.args != std::vector<std::string>{p1, p2, ids.switch_edge} ||
        crossing.tensor.shape() != std::vector<int>{4, 4, 2}) {
      fail("crossing factor '" + crossing.id + "' has the wrong signature");
    }
    if (switcher.args != std::vector<std::string>{ids.switch_edge}) {
      fail("switch factor '" + switcher.id + "' has the wrong signature");
    }
    covered_factors.insert(crossing.id);
    covered_factors.insert(switcher.id);
    switch_edges.insert(ids.switch_edge);

    // Close the box around phi, E~_e(., ., s), phi and the switch factor.
    const Matrix4& phi = phi_matrix();
    DenseTensor gate = DenseTensor::zeros({4, 4});
    for (int s = 0; s < 2; ++s) {
      const double w = switcher.tensor[static_cast<std::size_t>(s)];
      if (w == 0.0) continue;
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          double acc = 0.0;
          for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
              const int idx[3] = {a, b, s};
              acc += phi[i][a] * crossing.tensor.at(idx) * phi[b][j];
            }
          }
          const int ij[2] = {i, j};
          gate.set(ij, gate.at(ij) + w * acc);
        }
      }
    }
    const std::string gate_id = "E^" + base;
    out.map.gate_map[base] = gate_id;
    out.graph.factors.push_back({gate_id, {p1, p2}, std::move(gate)});
  }

  std::map<std::string, std::string> merged_base;
  for (const auto& [base, id] : map.factor_map) {
    if (!mdc.factor_index(id)) fail("merged factor '" + id + "' missing");
    merged_base[id] = base;
  }
  std::vector<Factor> merged;
  for (const Factor& f : mdc.factors) {
    const auto it = merged_base.find(f.id);
    if (it == merged_base.end()) {
      if (!covered_factors.count(f.id)) fail("factor '" + f.id + "' not in the map");
      continue;
    }
    const std::string new_id = "f^" + it->second;
    out.map.factor_map[it->second] = new_id;
    merged.push_back({new_id, f.args, transform_tensor(f.tensor)});
  }
  out.graph.factors.insert(out.graph.factors.begin(), merged.begin(), merged.end());

  for (const Edge& e : mdc.edges) {
    if (switch_edges.count(e.id)) continue;
    out.graph.edges.push_back(e);
  }
  if (out.graph.edges.size() + switch_edges.size() != mdc.edges.size() ||
      out.graph.edges.size() != 2 * map.pair_edge_map.size()) {
    fail("edge set does not match the map");
  }
  require_valid(out.graph);
  return out;
}

double bethe2_via_transform(const Nfg& nfg, const EnumerationOptions& opts) {
  const MdcResult avg = build_averaged_mdc(nfg);
  const TransformedNfg t = transform_mdc(avg.graph, avg.map);
  const double z = partition_sum(t.graph, opts);
  if (z < 0.0) {
    throw Error(ErrorKind::NegativePartitionSum,
                "averaged transformed partition sum is " + std::to_string(z));
  }
  return std::sqrt(z);
}

Matrix2 conditional_matrix(const DenseTensor& t, int axis, int value) {
  require_binary_degree(t, 3);
  if (axis < 0 || axis > 2 || value < 0 || value > 1) {
    throw Error(ErrorKind::WrongArity, "conditioning index out of range");
  }
  Matrix2 m{};
  int idx[3];
  idx[axis] = value;
  const int r = axis == 0 ? 1 : 0;
  const int c = axis == 2 ? 1 : 2;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      idx[r] = i;
      idx[c] = j;
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = t.at(idx);
    }
  }
  return m;
}

DenseTensor closed_form_degree2(const DenseTensor& t) {
  require_binary_degree(t, 2);
  const Matrix2 m = matrix_of(t);
  const double t00 = m[0][0], t01 = m[0][1], t10 = m[1][0], t11 = m[1][1];
  return DenseTensor(
      {4, 4},
      {t00 * t00, kSqrt2 * t00 * t01, 0.0, t01 * t01,
       kSqrt2 * t00 * t10, perm_of(m), 0.0, kSqrt2 * t01 * t11,
       0.0, 0.0, det_of(m), 0.0,
       t10 * t10, kSqrt2 * t10 * t11, 0.0, t11 * t11});
}

DenseTensor closed_form_degree2(const Factor& f) { return closed_form_degree2(f.tensor); }

DenseTensor closed_form_degree3(const DenseTensor& t) {
  require_binary_degree(t, 3);
  return transform_tensor(merge_tensor(t));
}

DenseTensor closed_form_degree3(const Factor& f) { return closed_form_degree3(f.tensor); }

PrintedDegree3 printed_degree3(const DenseTensor& f) {
  require_binary_degree(f, 3);
  auto t = [&](int a, int b, int c) {
    const int idx[3] = {a, b, c};
    return f.at(idx);
  };
  auto P = [&](int axis, int b) { return perm_of(conditional_matrix(f, axis - 1, b)); };
  auto D = [&](int axis, int b) { return det_of(conditional_matrix(f, axis - 1, b)); };
  const double r = kSqrt2;
  const double g = kGamma;

  // As printed (hat-0 = symbol 1, hat-1 = symbol 2), including the suspect
  // last term of f^(0,0,0).
  const double f000 = g * (t(0, 0, 0) * t(1, 1, 1) + t(1, 0, 0) * t(0, 1, 1) +
                           t(0, 1, 0) * t(1, 0, 1) + t(0, 0, 0) * t(1, 1, 0));
  const double f101 = g * (t(0, 0, 0) * t(1, 1, 1) - t(1, 0, 0) * t(0, 1, 1) +
                           t(0, 1, 0) * t(1, 0, 1) - t(0, 0, 1) * t(1, 1, 0));
  const double f011 = g * (t(0, 0, 0) * t(1, 1, 1) + t(1, 0, 0) * t(0, 1, 1) -
                           t(0, 1, 0) * t(1, 0, 1) - t(0, 0, 1) * t(1, 1, 0));
  const double f110 = g * (t(0, 0, 0) * t(1, 1, 1) - t(1, 0, 0) * t(0, 1, 1) -
                           t(0, 1, 0) * t(1, 0, 1) + t(0, 0, 1) * t(1, 1, 0));

  // cell[a3][a1][a2]
  const double cell[4][4][4] = {
      {{t(0, 0, 0) * t(0, 0, 0), r * t(0, 0, 0) * t(0, 1, 0), 0, t(0, 1, 0) * t(0, 1, 0)},
       {r * t(0, 0, 0) * t(1, 0, 0), P(3, 0), 0, r * t(0, 1, 0) * t(1, 1, 0)},
       {0, 0, D(3, 0), 0},
       {t(1, 0, 0) * t(1, 0, 0), r * t(1, 0, 0) * t(1, 1, 0), 0, t(1, 1, 0) * t(1, 1, 0)}},
      {{r * t(0, 0, 0) * t(0, 0, 1), P(1, 0), 0, r * t(0, 1, 0) * t(0, 1, 1)},
       {P(2, 0), f000, 0, P(2, 1)},
       {0, 0, f110, 0},
       {r * t(1, 0, 0) * t(1, 0, 1), P(1, 1), 0, r * t(1, 1, 0) * t(1, 1, 1)}},
      {{0, 0, D(1, 0), 0},
       {0, 0, f011, 0},
       {D(1, 0), f101, 0, D(1, 0)},
       {0, 0, D(1, 1), 0}},
      {{t(0, 0, 1) * t(0, 0, 1), r * t(0, 0, 1) * t(0, 1, 1), 0, t(0, 1, 1) * t(0, 1, 1)},
       {r * t(0, 0, 1) * t(1, 0, 1), P(3, 1), 0, r * t(0, 1, 1) * t(1, 1, 1)},
       {0, 0, D(3, 1), 0},
       {t(1, 0, 1) * t(1, 0, 1), r * t(1, 0, 1) * t(1, 1, 1), 0, t(1, 1, 1) * t(1, 1, 1)}}};

  PrintedDegree3 out{DenseTensor::zeros({4, 4, 4}), std::vector<bool>(64, false)};
  for (int a1 = 0; a1 < 4; ++a1) {
    for (int a2 = 0; a2 < 4; ++a2) {
      for (int a3 = 0; a3 < 4; ++a3) {
        const int idx[3] = {a1, a2, a3};
        out.values.set(idx, cell[a3][a1][a2]);
      }
    }
  }
  for (const auto& idx : {std::array<int, 3>{1, 1, 1}, std::array<int, 3>{2, 0, 2},
                          std::array<int, 3>{2, 3, 2}}) {
    out.flagged[out.values.offset(idx)] = true;
  }
  return out;
}

bool Degree3Verification::passed() const {
  if (max_abs_diff > 1e-12) return false;
  return std::all_of(flagged.begin(), flagged.end(), [](const FlaggedCell& c) {
    return std::abs(c.resolved - c.transform) <= 1e-12;
  });
}

Degree3Verification verify_degree3_printed(const DenseTensor& f) {
  const DenseTensor general = closed_form_degree3(f);
  const PrintedDegree3 printed = printed_degree3(f);
  Degree3Verification out;
  for (std::size_t flat = 0; flat < 64; ++flat) {
    if (printed.flagged[flat]) continue;
    ++out.cells_compared;
    out.max_abs_diff =
        std::max(out.max_abs_diff, std::abs(printed.values[flat] - general[flat]));
  }
  auto t = [&](int a, int b, int c) {
    const int idx[3] = {a, b, c};
    return f.at(idx);
  };
  auto cell = [&](std::array<int, 3> idx, std::string printed_formula,
                  std::string resolved_formula, double resolved) {
    const std::size_t flat = general.offset(idx);
    out.flagged.push_back({idx, std::move(printed_formula), std::move(resolved_formula),
                           printed.values[flat], resolved, general[flat]});
  };
  cell({1, 1, 1}, "g(t000 t111 + t100 t011 + t010 t101 + t000 t110)",
       "g(t000 t111 + t100 t011 + t010 t101 + t001 t110)",
       kGamma * (t(0, 0, 0) * t(1, 1, 1) + t(1, 0, 0) * t(0, 1, 1) +
                 t(0, 1, 0) * t(1, 0, 1) + t(0, 0, 1) * t(1, 1, 0)));
  cell({2, 0, 2}, "det(T_{f|a1=0})", "det(T_{f|a2=0})",
       det_of(conditional_matrix(f, 1, 0)));
  cell({2, 3, 2}, "det(T_{f|a1=0})", "det(T_{f|a2=1})",
       det_of(conditional_matrix(f, 1, 1)));
  return out;
}

DenseTensor closed_form_equality(int d) {
  if (d < 2) throw Error(ErrorKind::WrongArity, "equality transform needs d >= 2");
  DenseTensor out = DenseTensor::zeros(std::vector<int>(static_cast<std::size_t>(d), 4));
  const double mixed = std::pow(2.0, 1.0 - d / 2.0);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const std::vector<int> idx = out.unravel(flat);
    const auto all = [&](int v) {
      return std::all_of(idx.begin(), idx.end(), [v](int x) { return x == v; });
    };
    if (all(0) || all(3)) {
      out.set_flat(flat, 1.0);
      continue;
    }
    const bool in_middle =
        std::all_of(idx.begin(), idx.end(), [](int x) { return x == 1 || x == 2; });
    const auto twos = std::count(idx.begin(), idx.end(), 2);
    if (in_middle && twos % 2 == 0) out.set_flat(flat, mixed);
  }
  return out;
}

NonnegativeCheck check_nonnegative_transform(const DenseTensor& t, bool require_lsm) {
  if (t.arity() != 2 && t.arity() != 3) {
    throw Error(ErrorKind::WrongArity, "expected a degree-2 or degree-3 function");
  }
  if (!t.all_binary()) {
    throw Error(ErrorKind::WrongCardinality, "expected binary arguments");
  }
  if (require_lsm && !is_log_supermodular(t)) {
    throw Error(ErrorKind::NotLogSupermodular, "function is not log-supermodular");
  }
  const DenseTensor hat = transform_tensor(merge_tensor(t));
  const auto [lo, hi] = std::minmax_element(hat.values().begin(), hat.values().end());
  return {*lo >= -1e-12 * *hi, *lo, *hi};
}

LemmaQuantities lemma_quantities(const DenseTensor& f) {
  require_binary_degree(f, 3);
  auto t = [&](int a, int b, int c) {
    const int idx[3] = {a, b, c};
    return f.at(idx);
  };
  LemmaQuantities q;
  q.s = {kGamma * t(0, 0, 0) * t(1, 1, 1), kGamma * t(1, 0, 0) * t(0, 1, 1),
         kGamma * t(0, 1, 0) * t(1, 0, 1), kGamma * t(0, 0, 1) * t(1, 1, 0)};
  const auto& s = q.s;
  q.combinations = {s[0] + s[1] + s[2] + s[3], s[0] - s[1] + s[2] - s[3],
                    s[0] + s[1] - s[2] - s[3], s[0] - s[1] - s[2] + s[3]};
  return q;
}

bool LemmaQuantities::inequalities_hold() const {
  const double tol = 1e-12 * s[0];
  return s[0] >= s[1] - tol && s[0] >= s[2] - tol && s[0] >= s[3] - tol &&
         s[0] * s[1] >= s[2] * s[3] - 1e-12 * s[0] * s[0];
}

bool LemmaQuantities::combinations_nonnegative() const {
  const double scale = *std::max_element(s.begin(), s.end());
  return std::all_of(combinations.begin(), combinations.end(),
                     [&](double c) { return c >= -1e-12 * scale; });
}

std::string class_violation(const Nfg& nfg) {
  if (nfg.has_half_edges()) return "half edges present";
  if (!nfg.all_binary()) return "non-binary edge";
  for (const Factor& f : nfg.factors) {
    const bool equality = is_equality_tensor(f.tensor);
    if (equality && f.degree() < 2) {
      return "equality factor '" + f.id + "' has degree < 2";
    }
    if (!equality && f.degree() != 2 && f.degree() != 3) {
      return "factor '" + f.id + "' has degree " + std::to_string(f.degree());
    }
  }
  return {};
}

SignStructureReport check_sign_structure(const Nfg& nfg, const CoverSpec& spec,
                                         const EnumerationOptions& opts) {
  require_valid(nfg);
  if (const std::string why = class_violation(nfg); !why.empty()) {
    throw Error(ErrorKind::ClassViolation, why);
  }
  for (const Factor& f : nfg.factors) {
    if (!is_log_supermodular(f.tensor)) {
      throw Error(ErrorKind::NotLogSupermodular,
                  "factor '" + f.id + "' is not log-supermodular");
    }
  }
  const std::uint64_t crossed = crossed_mask(nfg, spec);
  const MdcResult cover_mdc = build_mdc(nfg, spec);
  const MdcResult trivial_mdc = build_mdc(nfg, trivial_cover(nfg, 2));
  const TransformedNfg hat = transform_mdc(cover_mdc.graph, cover_mdc.map);
  const TransformedNfg hat_trivial = transform_mdc(trivial_mdc.graph, trivial_mdc.map);

  for (const TransformedNfg* g : {&hat, &hat_trivial}) {
    for (const auto& [base, gate_id] : g->map.gate_map) {
      const DenseTensor& gate = g->graph.factor(gate_id).tensor;
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          const int ij[2] = {i, j};
          if (i != j && gate.at(ij) != 0.0) {
            throw Error(ErrorKind::NotAnMdc, "gate '" + gate_id + "' is not diagonal");
          }
        }
      }
    }
  }

  double scale = 1.0;
  for (const auto& [base, id] : hat_trivial.map.factor_map) {
    scale *= hat_trivial.graph.factor(id).tensor.max_abs();
  }

  SignStructureReport report;
  const std::size_t n = nfg.edges.size();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    total *= 4;
    if (total > opts.cap) {
      throw Error(ErrorKind::EnumerationCapExceeded, "4^|E| exceeds the cap");
    }
  }
  Configuration config;
  double z_hat = 0.0;
  double z_hat_trivial = 0.0;
  for (std::uint64_t c = 0; c < total; ++c) {
    std::uint64_t rest = c;
    int expected_sign = 1;
    for (std::size_t e = 0; e < n; ++e) {
      const int symbol = static_cast<int>(rest % 4);
      rest /= 4;
      const auto& [p1, p2] = hat.map.pair_edge_map.at(nfg.edges[e].id);
      config[p1] = symbol;
      config[p2] = symbol;
      if (symbol == 2 && ((crossed >> e) & 1U)) expected_sign = -expected_sign;
    }
    const double g = global_function(hat.graph, config);
    const double g_trivial = global_function(hat_trivial.graph, config);
    z_hat += g;
    z_hat_trivial += g_trivial;
    if (g_trivial < -1e-12 * scale) {
      report.violations.push_back({c, "negative-trivial", g, g_trivial});
    }
    const double mag_tol = 1e-9 * std::abs(g_trivial) + 1e-12 * scale;
    if (std::abs(std::abs(g) - std::abs(g_trivial)) > mag_tol) {
      report.violations.push_back({c, "magnitude-mismatch", g, g_trivial});
    } else if (std::abs(g_trivial) > 1e-12 * scale &&
               (g > 0 ? 1 : -1) != expected_sign * (g_trivial > 0 ? 1 : -1)) {
      report.violations.push_back({c, "sign-mismatch", g, g_trivial});
    }
  }
  report.configurations = total;
  report.z_cover = z_hat;
  report.z_trivial = z_hat_trivial;
  report.z_base = partition_sum(nfg, opts);
  report.bound_holds = z_hat <= report.z_base * report.z_base * (1.0 + 1e-9);
  return report;
}

}  // namespace nfgcover
