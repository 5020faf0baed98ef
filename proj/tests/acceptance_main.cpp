// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "nfgcover/bethe.hpp"
#include "nfgcover/covers.hpp"
#include "nfgcover/generate.hpp"
#include "nfgcover/holo.hpp"
#include "nfgcover/mdc.hpp"
#include "nfgcover/nfg.hpp"

using namespace nfgcover;

namespace {

Nfg c2() {
  Nfg n;
  n.name = "C2";
  n.edges = {{"e1", 2, false}, {"e2", 2, false}};
  n.factors = {{"f1", {"e1", "e2"}, DenseTensor({2, 2}, {2, 1, 1, 2})},
               {"f2", {"e1", "e2"}, DenseTensor({2, 2}, {2, 1, 1, 2})}};
  return n;
}

double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<Nfg> random_binary_instances() {
  std::vector<Nfg> out;
  for (std::uint64_t seed = 1; out.size() < 50; ++seed) {
    GeneratorSpec spec;
    spec.seed = seed;
    spec.topology = Topology::Random;
    spec.nodes = 2 + static_cast<int>(seed % 4);
    spec.max_edges = 6;
    spec.lsm = false;
    out.push_back(gen_instance(spec));
  }
  return out;
}

std::vector<Nfg> class_instances() {
  std::vector<Nfg> out;
  for (std::uint64_t seed = 1000; out.size() < 50; ++seed) {
    GeneratorSpec spec;
    spec.seed = seed;
    spec.topology = Topology::Random;
    spec.nodes = 2 + static_cast<int>(seed % 4);
    spec.max_edges = 6;
    spec.max_equality_degree = 4;
    out.push_back(gen_instance(spec));
  }
  return out;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome criterion1(const std::vector<Nfg>& instances) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t covers = 0;
  for (const Nfg& n : instances) {
    for (const CoverSpec& c : all_double_covers(n)) {
      const double zc = partition_sum(build_cover(n, c));
      const MdcResult m = build_mdc(n, c);
      const double zm = partition_sum(m.graph);
      const double zt = partition_sum(transform_mdc(m.graph, m.map).graph);
      worst = std::max({worst, rel_err(zc, zm), rel_err(zc, zt)});
      ++covers;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 1e-9 && secs <= 60.0,
          fmt::format("{} covers, max rel err {:.3g}, {:.2f} s", covers, worst, secs)};
}

Outcome criterion2(const std::vector<Nfg>& instances) {
  double worst = 0.0;
  for (const Nfg& n : instances) {
    const MdcResult avg = build_averaged_mdc(n);
    const double via_transform = std::sqrt(partition_sum(transform_mdc(avg.graph, avg.map).graph));
    worst = std::max(worst, rel_err(via_transform, bethe_m(n, 2).value));
  }
  const double c2_transform = bethe2_via_transform(c2());
  const double c2_covers = bethe_m(c2(), 2).value;
  const double target = std::sqrt(91.0);
  const bool c2_ok = std::abs(c2_transform - target) <= 1e-8 && std::abs(c2_covers - target) <= 1e-8;
  return {worst <= 1e-9 && c2_ok,
          fmt::format("max rel err {:.3g}; C2 {:.12f} / {:.12f}", worst, c2_transform, c2_covers)};
}

Outcome criterion3(const std::vector<Nfg>& instances) {
  std::size_t covers = 0;
  std::size_t bound_violations = 0;
  std::size_t sign_violations = 0;
  for (const Nfg& n : instances) {
    if (!class_violation(n).empty()) return {false, "instance outside the class: " + n.name};
    const double z = partition_sum(n);
    for (const CoverSpec& c : all_double_covers(n)) {
      ++covers;
      if (partition_sum(build_cover(n, c)) > z * z * (1.0 + 1e-9)) ++bound_violations;
      const SignStructureReport r = check_sign_structure(n, c);
      sign_violations += r.violations.size();
      if (!r.bound_holds) ++bound_violations;
    }
  }
  return {bound_violations == 0 && sign_violations == 0,
          fmt::format("{} covers, {} bound violations, {} sign violations", covers,
                      bound_violations, sign_violations)};
}

Outcome criterion4(const std::vector<Nfg>& instances) {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double max_ratio = 0.0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    CoverOptions opts;
    opts.mode = CoverMode::MonteCarlo;
    opts.samples = 200;
    opts.seed = 7000 + i;
    const RuozziReport r = check_ruozzi(instances[i], 3, opts);
    checked += r.covers_checked;
    violations += r.violations.size();
    max_ratio = std::max(max_ratio, r.max_ratio);
  }
  return {violations == 0 && checked == 200 * instances.size(),
          fmt::format("{} covers, {} violations, max Z(cover)/Z^3 {:.6f}", checked, violations,
                      max_ratio)};
}

Outcome criterion5() {
  Rng rng(5);
  int negative = 0;
  int inequality_failures = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const DenseTensor t = random_lsm_tensor(3, 1.0, rng);
    const NonnegativeCheck c = check_nonnegative_transform(t);
    if (c.min_entry < -1e-12 * c.max_entry) ++negative;
    worst = std::min(worst, c.min_entry / c.max_entry);
    if (!lemma_quantities(t).inequalities_hold()) ++inequality_failures;
  }
  return {negative == 0 && inequality_failures == 0,
          fmt::format("1000 tensors, {} negative, {} inequality failures, min/max {:.3g}",
                      negative, inequality_failures, worst)};
}

Outcome criterion6() {
  Rng rng(6);
  double d2 = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const DenseTensor t = random_tensor(2, 1.0, rng);
    d2 = std::max(d2, max_abs_diff(closed_form_degree2(t), transform_tensor(merge_tensor(t))));
  }
  double eq = 0.0;
  for (int d = 2; d <= 5; ++d) {
    eq = std::max(eq, max_abs_diff(closed_form_equality(d),
                                   transform_tensor(merge_tensor(equality_tensor(d)))));
  }
  double d3 = 0.0;
  bool resolved = true;
  std::vector<FlaggedCell> flagged;
  for (int i = 0; i < 200; ++i) {
    const Degree3Verification v = verify_degree3_printed(random_lsm_tensor(3, 1.0, rng));
    d3 = std::max(d3, v.max_abs_diff);
    resolved = resolved && v.passed();
    if (flagged.empty()) flagged = v.flagged;
  }
  for (const FlaggedCell& f : flagged) {
    fmt::print("  cell ({},{},{}): printed {} -> resolved {} (printed {:.6g}, resolved {:.6g}, "
               "transform {:.6g})\n",
               f.index[0], f.index[1], f.index[2], f.printed_formula, f.resolved_formula,
               f.printed, f.resolved, f.transform);
  }
  return {d2 <= 1e-12 && eq <= 1e-12 && d3 <= 1e-12 && resolved,
          fmt::format("degree-2 {:.3g}, equality {:.3g}, degree-3 {:.3g}, {} flagged cells resolved",
                      d2, eq, d3, flagged.size())};
}

Outcome criterion7() {
  const Nfg n = c2();
  const double z = partition_sum(n);
  const auto census = double_cover_census(n);
  const std::vector<double> expected = {100, 82, 82, 100};
  bool census_ok = census.size() == 4;
  for (std::size_t i = 0; census_ok && i < 4; ++i) census_ok = census[i].z == expected[i];
  const RatioReport r = ratio_report(n);
  const double s91 = std::sqrt(91.0);
  const bool ok = z == 10.0 && census_ok && std::abs(r.z_b2 - s91) <= 1e-8 &&
                  std::abs(r.z_bethe - 9.0) <= 1e-6 && std::abs(r.r1 - 10.0 / 9.0) <= 1e-6 &&
                  std::abs(r.r2 - 10.0 / s91) <= 1e-9 && std::abs(r.r3 - s91 / 9.0) <= 1e-6 &&
                  std::abs(r.r1 - r.r2 * r.r3) <= 1e-9;
  return {ok, fmt::format("Z {}, Z_B,2 {:.10f}, Z_B {:.10f}, ratios {:.6f} {:.6f} {:.6f}", z,
                          r.z_b2, r.z_bethe, r.r1, r.r2, r.r3)};
}

Outcome criterion8() {
  double worst = 0.0;
  int unconverged = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorSpec spec;
    spec.seed = seed;
    spec.topology = Topology::Tree;
    spec.nodes = 2 + static_cast<int>(seed % 7);
    spec.strength = 1.0 + 0.1 * static_cast<double>(seed);
    const Nfg n = gen_instance(spec);
    const double z = partition_sum(n);
    const auto states = run_sum_product(n);
    if (!states[0].converged) ++unconverged;
    const double zb = bethe_partition_sum(n, states).z_bethe;
    worst = std::max({worst, rel_err(zb, z), rel_err(bethe_m(n, 2).value, z)});
  }
  return {worst <= 1e-8 && unconverged == 0,
          fmt::format("20 trees, max rel err {:.3g}, {} unconverged", worst, unconverged)};
}

Outcome criterion9() {
  const Nfg n = c2();
  const double b1 = bethe_m(n, 1).value;
  const double b2 = bethe_m(n, 2).value;
  std::size_t covers = 0;
  enumerate_covers(n, 3, [&](const CoverSpec&) { ++covers; });
  const double b3 = bethe_m(n, 3).value;
  const double zb = bethe_partition_sum(n, run_sum_product(n)).z_bethe;
  return {covers == 36 && b1 >= b2 && b2 >= b3 && b3 >= zb - 1e-6 && std::abs(zb - 9.0) <= 1e-6,
          fmt::format("{} triple covers; {:.6f} >= {:.6f} >= {:.6f} >= {:.6f}", covers, b1, b2,
                      b3, zb)};
}

}  // namespace

int main() {
  const std::vector<Nfg> binary = random_binary_instances();
  const std::vector<Nfg> lsm = class_instances();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"double-cover identity", [&] { return criterion1(binary); }},
      {"degree-2 Bethe via transform", [&] { return criterion2(binary); }},
      {"double-cover bound and sign structure", [&] { return criterion3(lsm); }},
      {"triple-cover bound (sampled)", [&] { return criterion4(lsm); }},
      {"non-negativity of degree-3 transforms", criterion5},
      {"closed-form equivalence", criterion6},
      {"C2 golden numbers", criterion7},
      {"tree exactness", criterion8},
      {"C2 Bethe-M monotonicity", criterion9},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    fmt::print("{} criterion {}: {} ({})\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
               o.detail);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
