#include "nfgcover/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "nfgcover/bethe.hpp"
#include "nfgcover/covers.hpp"
#include "nfgcover/error.hpp"
#include "nfgcover/generate.hpp"
#include "nfgcover/holo.hpp"
#include "nfgcover/io.hpp"
#include "nfgcover/mdc.hpp"
#include "nfgcover/nfg.hpp"

namespace nfgcover {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string file;
  std::string second;
  int M = 2;
  bool exact = false;
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> seed;
  double tol = 1e-10;
  double damping = 0.5;
  int max_iters = 10000;
  int restarts = 0;
  int threads = 1;
  std::string out;
  bool log_domain = false;
  std::uint64_t cap = std::uint64_t{1} << 28;
  bool json = false;
  bool averaged = false;
  bool all_double_covers = false;
  bool fixtures_only = false;

  // gen
  std::string topology = "cycle";
  int nodes = 2;
  int degree = 3;
  int max_edges = 6;
  double equality_fraction = 0.3;
  int max_equality_degree = 4;
  double strength = 1.0;
  bool symmetric = false;
  bool non_lsm = false;
};

std::string num(double v) { return fmt::format("{}", v); }

double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

bool close(double a, double b, double rel = 1e-9) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + 1e-12;
}

EnumerationOptions enumeration(const Flags& f) { return EnumerationOptions{f.cap}; }

std::uint64_t require_seed(const Flags& f, const char* command) {
  if (!f.seed) throw UsageError(std::string(command) + " is randomized and needs --seed");
  return *f.seed;
}

CoverOptions cover_options(const Flags& f, const char* command) {
  if (f.exact && f.samples) throw UsageError("--exact and --samples are exclusive");
  CoverOptions co;
  co.enumeration = enumeration(f);
  co.threads = f.threads;
  if (f.samples) {
    co.mode = CoverMode::MonteCarlo;
    co.samples = *f.samples;
    co.seed = require_seed(f, command);
  }
  return co;
}

BpOptions bp_options(const Flags& f, const char* command) {
  BpOptions bp;
  bp.tol = f.tol;
  bp.damping = f.damping;
  bp.max_iters = f.max_iters;
  bp.restarts = f.restarts;
  if (f.restarts > 0) bp.seed = require_seed(f, command);
  return bp;
}

void emit(const Flags& f, std::ostream& out, const std::string& text) {
  if (f.out.empty()) {
    out << text;
  } else {
    write_text_file(f.out, text);
  }
}

std::string map_path(const std::string& out) { return out + ".map.json"; }

int cmd_validate(const Flags& f, std::ostream& out) {
  const Nfg nfg = load_nfg(f.file);
  const auto diags = validate(nfg);
  for (const auto& d : diags) {
    out << d.invariant << "\t" << d.element << "\t" << d.message << "\n";
  }
  if (diags.empty()) out << "ok\n";
  return diags.empty() ? kExitOk : kExitVerificationFailed;
}

int cmd_z(const Flags& f, std::ostream& out) {
  const Nfg nfg = load_nfg(f.file);
  if (f.log_domain) {
    const SignedLog z = partition_sum_log(nfg, enumeration(f));
    out << fmt::format("sign {} log|Z| {}\n", z.sign, z.log_abs);
  } else {
    out << num(partition_sum(nfg, enumeration(f))) << "\n";
  }
  return kExitOk;
}

int cmd_cover_z(const Flags& f, std::ostream& out) {
  const Nfg nfg = load_nfg(f.file);
  const CoverSpec spec = cover_from_json(read_json_file(f.second));
  const Nfg cover = build_cover(nfg, spec);
  if (!f.out.empty()) save_nfg(f.out, cover);
  out << num(partition_sum(cover, enumeration(f))) << "\n";
  return kExitOk;
}

int cmd_census(const Flags& f, std::ostream& out) {
  const Nfg nfg = load_nfg(f.file);
  std::ostringstream csv;
  write_census_csv(csv, double_cover_census(nfg, f.threads, enumeration(f)));
  emit(f, out, csv.str());
  return kExitOk;
}

int cmd_bethe_m(const Flags& f, std::ostream& out) {
  const Nfg nfg = load_nfg(f.file);
  const BetheMEstimate est = bethe_m(nfg, f.M, cover_options(f, "bethe-m"));
  if (est.mode == CoverMode::Exact) {
    out << num(est.value) << "\n";
  } else {
    out << num(est.value) << " +- " << num(est.stderr_value) << " (" << est.samples
        << " sampled covers, seed " << est.seed << ")\n";
  }
  return kExitOk;
}

int cmd_mdc_build(const Flags& f, std::ostream& out) {
  const Nfg nfg = load_nfg(f.file);
  MdcResult mdc;
  if (f.averaged) {
    mdc = build_averaged_mdc(nfg);
  } else if (!f.second.empty()) {
    mdc = build_mdc(nfg, cover_from_json(read_json_file(f.second)));
  } else {
    throw UsageError("mdc-build needs a cover file or --averaged");
  }
  if (f.out.empty()) {
    out << Json{{"nfg", nfg_to_json(mdc.graph)}, {"map", construction_map_to_json(mdc.map)}}
               .dump(2)
        << "\n";
  } else {
    save_nfg(f.out, mdc.graph);
    write_text_file(map_path(f.out), construction_map_to_json(mdc.map).dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_mdc_transform(const Flags& f, std::ostream& out) {
  if (f.second.empty()) throw UsageError("mdc-transform needs MDC_FILE MAP_FILE");
  const Nfg mdc = load_nfg(f.file);
  const ConstructionMap map = construction_map_from_json(read_json_file(f.second));
  const TransformedNfg t = transform_mdc(mdc, map);
  if (f.out.empty()) {
    out << Json{{"nfg", nfg_to_json(t.graph)}, {"map", construction_map_to_json(t.map)}}
               .dump(2)
        << "\n";
  } else {
    save_nfg(f.out, t.graph);
    write_text_file(map_path(f.out), construction_map_to_json(t.map).dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_bethe2_transform(const Flags& f, std::ostream& out) {
  const Nfg nfg = load_nfg(f.file);
  out << num(bethe2_via_transform(nfg, enumeration(f))) << "\n";
  return kExitOk;
}

int cmd_check_lsm(const Flags& f, std::ostream& out) {
  const Nfg nfg = load_nfg(f.file);
  bool all = true;
  out << "claim: f(a')f(a'') <= f(min(a',a''))f(max(a',a'')) for every factor\n";
  for (const Factor& fac : nfg.factors) {
    const bool ok = is_log_supermodular(fac.tensor);
    all = all && ok;
    out << fac.id << "\t" << (ok ? "log-supermodular" : "NOT log-supermodular");
    if (fac.degree() == 2 && fac.tensor.all_binary()) {
      out << "\tdet " << num(det_of(matrix_of(fac)));
    }
    out << "\n";
  }
  return all ? kExitOk : kExitVerificationFailed;
}

int cmd_check_ruozzi(const Flags& f, std::ostream& out) {
  const Nfg nfg = load_nfg(f.file);
  const RuozziReport r = check_ruozzi(nfg, f.M, cover_options(f, "check-ruozzi"));
  if (f.json) {
    Json v = Json::array();
    for (const auto& x : r.violations) v.push_back({{"index", x.index}, {"z", x.z}, {"ratio", x.ratio}});
    out << Json{{"M", r.M}, {"mode", r.mode == CoverMode::Exact ? "exact" : "monte-carlo"},
                {"coversChecked", r.covers_checked}, {"Z", r.z_base},
                {"maxRatio", r.max_ratio}, {"violations", v}, {"passed", r.passed()}}
               .dump(2)
        << "\n";
  } else {
    out << fmt::format("claim: Z(cover) <= Z(N)^{} for every {}-cover\n", r.M, r.M);
    out << fmt::format("covers checked: {} ({})\n", r.covers_checked,
                       r.mode == CoverMode::Exact ? "exact" : "sampled");
    out << fmt::format("Z(N) = {}; max Z(cover)/Z(N)^M = {}; slack = {}\n", num(r.z_base),
                       num(r.max_ratio), num(1.0 - r.max_ratio));
    out << fmt::format("violations: {}\n", r.violations.size());
  }
  return r.passed() ? kExitOk : kExitVerificationFailed;
}

int cmd_check_eq4(const Flags& f, std::ostream& out) {
  const Nfg nfg = load_nfg(f.file);
  const auto opts = enumeration(f);
  std::ostringstream csv;
  csv << "# nfgcover eq4 v1\n" << "bitmask,Z_cover,Z_mdc,Z_tmdc,max_rel_err\n";
  bool ok = true;
  double worst = 0.0;
  std::uint64_t mask = 0;
  enumerate_double_covers(
      nfg,
      [&](const CoverSpec& spec) {
        const double zc = partition_sum(build_cover(nfg, spec), opts);
        const MdcResult mdc = build_mdc(nfg, spec);
        const double zm = partition_sum(mdc.graph, opts);
        const double zt = partition_sum(transform_mdc(mdc.graph, mdc.map).graph, opts);
        const double err = std::max(rel_diff(zc, zm), rel_diff(zc, zt));
        worst = std::max(worst, err);
        ok = ok && close(zc, zm) && close(zc, zt);
        csv << fmt::format("{},{},{},{},{}\n", mask++, zc, zm, zt, err);
      },
      opts);
  emit(f, out, csv.str());
  out << fmt::format(
      "# claim: Z(cover) = Z(MDC) = Z(transformed MDC); covers {}; max relative error {}; {}\n",
      mask, num(worst), ok ? "PASS" : "FAIL");
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_check_signs(const Flags& f, std::ostream& out) {
  const Nfg nfg = load_nfg(f.file);
  std::vector<CoverSpec> specs;
  if (!f.second.empty()) {
    specs.push_back(cover_from_json(read_json_file(f.second)));
  } else {
    specs = all_double_covers(nfg, enumeration(f));
  }
  out << "claim: g^trivial >= 0 and g = +-g^trivial on every configuration; "
         "Z(cover) <= Z(N)^2\n";
  bool ok = true;
  Json reports = Json::array();
  for (const CoverSpec& spec : specs) {
    const SignStructureReport r = check_sign_structure(nfg, spec, enumeration(f));
    ok = ok && r.passed();
    const std::uint64_t mask = crossed_mask(nfg, spec);
    if (f.json) {
      reports.push_back({{"bitmask", mask}, {"configurations", r.configurations},
                         {"violations", r.violations.size()}, {"Zcover", r.z_cover},
                         {"Ztrivial", r.z_trivial}, {"Z", r.z_base},
                         {"boundHolds", r.bound_holds}});
    } else {
      out << fmt::format(
          "cover {}: {} configurations, {} violations, Z(cover) = {} <= Z(N)^2 = {} "
          "(slack {}) {}\n",
          mask, r.configurations, r.violations.size(), num(r.z_cover),
          num(r.z_base * r.z_base), num(r.z_base * r.z_base - r.z_cover),
          r.passed() ? "PASS" : "FAIL");
    }
  }
  if (f.json) out << reports.dump(2) << "\n";
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_check_closed_forms(const Flags& f, std::ostream& out) {
  const std::uint64_t seed = require_seed(f, "check-closed-forms");
  const std::uint64_t n = f.samples.value_or(200);
  Rng rng(seed);
  bool ok = true;

  double worst2 = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const DenseTensor t = random_tensor(2, f.strength, rng);
    const DenseTensor a = closed_form_degree2(t);
    const DenseTensor b = transform_tensor(merge_tensor(t));
    for (std::size_t k = 0; k < a.size(); ++k) worst2 = std::max(worst2, std::abs(a[k] - b[k]));
  }
  ok = ok && worst2 <= 1e-12;
  out << fmt::format("degree-2 closed form vs transform: {} tensors, max abs diff {}\n", n,
                     num(worst2));

  for (int d = 2; d <= 5; ++d) {
    const DenseTensor a = closed_form_equality(d);
    const DenseTensor b = transform_tensor(merge_tensor(equality_tensor(d)));
    double diff = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) diff = std::max(diff, std::abs(a[k] - b[k]));
    ok = ok && diff <= 1e-12;
    out << fmt::format("equality d={} closed form vs transform: max abs diff {}\n", d, num(diff));
  }

  double worst3 = 0.0;
  bool resolved = true;
  Degree3Verification last;
  for (std::uint64_t i = 0; i < n; ++i) {
    const DenseTensor t = random_lsm_tensor(3, f.strength, rng);
    last = verify_degree3_printed(t);
    worst3 = std::max(worst3, last.max_abs_diff);
    resolved = resolved && last.passed();
  }
  ok = ok && worst3 <= 1e-12 && resolved;
  out << fmt::format(
      "degree-3 printed array vs transform: {} tensors, {} unflagged cells, max abs diff {}\n", n,
      last.cells_compared, num(worst3));
  for (const FlaggedCell& c : last.flagged) {
    out << fmt::format("flagged cell ({},{},{}): printed {} -> resolved {} (example: printed {}, "
                       "resolved {}, transform {})\n",
                       c.index[0], c.index[1], c.index[2], c.printed_formula,
                       c.resolved_formula, num(c.printed), num(c.resolved), num(c.transform));
  }
  out << (ok ? "PASS\n" : "FAIL\n");
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_bp(const Flags& f, std::ostream& out) {
  const Nfg nfg = load_nfg(f.file);
  const auto states = run_sum_product(nfg, bp_options(f, "bp"));
  for (const BpState& s : states) {
    out << fmt::format("start {}: iterations {}, converged {}, residual {}\n", s.start,
                       s.iterations, s.converged, num(s.max_residual));
  }
  const BetheResult r = bethe_partition_sum(nfg, states);
  out << fmt::format("Z_B (best fixed point found) = {}\nF_B = {}\n", num(r.z_bethe),
                     num(r.free_energy));
  return kExitOk;
}

int cmd_report_ratios(const Flags& f, std::ostream& out) {
  const Nfg nfg = load_nfg(f.file);
  const RatioReport r = ratio_report(nfg, bp_options(f, "report-ratios"), enumeration(f));
  Json bp = Json::array();
  for (const BpState& s : r.bp) {
    bp.push_back({{"start", s.start}, {"iterations", s.iterations},
                  {"converged", s.converged}, {"maxResidual", s.max_residual}});
  }
  const Json j{{"Z", r.z}, {"Z_B2", r.z_b2},
               {"Z_B2_census", std::isnan(r.z_b2_census) ? Json() : Json(r.z_b2_census)},
               {"Z_B", r.z_bethe}, {"r1", r.r1}, {"r2", r.r2}, {"r3", r.r3},
               {"identityHolds", r.identity_holds}, {"censusAgrees", r.census_agrees},
               {"bp", bp}};
  out << fmt::format("{:<28}{}\n", "Z", num(r.z));
  out << fmt::format("{:<28}{}\n", "Z_B,2", num(r.z_b2));
  out << fmt::format("{:<28}{}\n", "Z_B (best fixed point)", num(r.z_bethe));
  out << fmt::format("{:<28}{}\n", "r1 = Z/Z_B", num(r.r1));
  out << fmt::format("{:<28}{}\n", "r2 = Z/Z_B,2", num(r.r2));
  out << fmt::format("{:<28}{}\n", "r3 = Z_B,2/Z_B", num(r.r3));
  out << fmt::format("{:<28}{}\n", "r1 - r2*r3", num(r.r1 - r.r2 * r.r3));
  if (f.out.empty()) {
    out << j.dump(2) << "\n";
  } else {
    write_text_file(f.out, j.dump(2) + "\n");
  }
  return r.identity_holds && r.census_agrees ? kExitOk : kExitVerificationFailed;
}

int cmd_gen(const Flags& f, std::ostream& out) {
  GeneratorSpec spec;
  spec.seed = require_seed(f, "gen");
  spec.topology = parse_topology(f.topology);
  spec.nodes = f.nodes;
  spec.degree = f.degree;
  spec.max_edges = f.max_edges;
  spec.equality_fraction = f.equality_fraction;
  spec.max_equality_degree = f.max_equality_degree;
  spec.strength = f.strength;
  spec.symmetric = f.symmetric;
  spec.lsm = !f.non_lsm;
  emit(f, out, dump_nfg(gen_instance(spec)));
  return kExitOk;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  if (args.size() >= 2 && args[0] == "check") {
    args[1] = "check-" + args[1];
    args.erase(args.begin());
  }

  Flags f;
  CLI::App app{"Partition sums of normal factor graphs and their graph covers"};
  app.require_subcommand(1);
  std::function<int(const Flags&, std::ostream&)> action;

  auto add = [&](const std::string& name, const std::string& help, auto fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->callback([&action, fn] { action = fn; });
    sub->add_option("--out", f.out, "Output file");
    sub->add_option("--cap", f.cap, "Enumeration cap");
    return sub;
  };
  auto cover_flags = [&](CLI::App* sub) {
    sub->add_option("--M", f.M, "Cover degree");
    sub->add_flag("--exact", f.exact, "Enumerate every labeled cover");
    sub->add_option("--samples", f.samples, "Number of sampled covers");
    sub->add_option("--seed", f.seed, "Random seed");
    sub->add_option("--threads", f.threads, "Worker threads");
  };
  auto bp_flags = [&](CLI::App* sub) {
    sub->add_option("--tol", f.tol, "Convergence tolerance");
    sub->add_option("--damping", f.damping, "Damping in [0,1)");
    sub->add_option("--max-iters", f.max_iters, "Maximum sweeps");
    sub->add_option("--restarts", f.restarts, "Random restarts");
    sub->add_option("--seed", f.seed, "Random seed");
  };

  add("validate", "Check NFG invariants", cmd_validate)
      ->add_option("file", f.file)->required();
  {
    auto* s = add("z", "Exact partition sum", cmd_z);
    s->add_option("file", f.file)->required();
    s->add_flag("--log-domain", f.log_domain, "Accumulate signed log-magnitudes");
  }
  {
    auto* s = add("cover-z", "Partition sum of the cover given by a cover file", cmd_cover_z);
    s->add_option("file", f.file)->required();
    s->add_option("cover", f.second)->required();
  }
  {
    auto* s = add("covers-census", "Partition sums of all double covers (CSV)", cmd_census);
    s->add_option("file", f.file)->required();
    s->add_option("--threads", f.threads, "Worker threads");
  }
  {
    auto* s = add("bethe-m", "Degree-M Bethe partition sum", cmd_bethe_m);
    s->add_option("file", f.file)->required();
    cover_flags(s);
  }
  {
    auto* s = add("mdc-build", "Merged double cover NFG", cmd_mdc_build);
    s->add_option("file", f.file)->required();
    s->add_option("cover", f.second);
    s->add_flag("--averaged", f.averaged, "Switch factors [1/2, 1/2]");
  }
  {
    auto* s = add("mdc-transform", "Holographic transform of an MDC-NFG", cmd_mdc_transform);
    s->add_option("mdc", f.file)->required();
    s->add_option("map", f.second)->required();
  }
  add("bethe2-transform", "Z_B,2 from the transformed averaged MDC-NFG", cmd_bethe2_transform)
      ->add_option("file", f.file)->required();
  add("check-lsm", "Log-supermodularity of every factor", cmd_check_lsm)
      ->add_option("file", f.file)->required();
  {
    auto* s = add("check-ruozzi", "Z(cover) <= Z^M over M-covers", cmd_check_ruozzi);
    s->add_option("file", f.file)->required();
    cover_flags(s);
    s->add_flag("--json", f.json, "JSON report");
  }
  {
    auto* s = add("check-eq4", "Z(cover) = Z(MDC) = Z(transformed MDC)", cmd_check_eq4);
    s->add_option("file", f.file)->required();
    s->add_flag("--all-double-covers", f.all_double_covers, "Check every double cover");
  }
  {
    auto* s = add("check-signs", "Sign structure of transformed MDC-NFGs", cmd_check_signs);
    s->add_option("file", f.file)->required();
    s->add_option("cover", f.second);
    s->add_flag("--json", f.json, "JSON report");
  }
  {
    auto* s = add("check-closed-forms", "Closed-form transformed tables", cmd_check_closed_forms);
    s->add_option("--samples", f.samples, "Random tensors per check");
    s->add_option("--seed", f.seed, "Random seed");
    s->add_option("--strength", f.strength, "Log-domain coupling bound");
  }
  {
    auto* s = add("bp", "Sum-product and Bethe partition sum", cmd_bp);
    s->add_option("file", f.file)->required();
    bp_flags(s);
  }
  {
    auto* s = add("report-ratios", "Z, Z_B,2, Z_B and their ratios", cmd_report_ratios);
    s->add_option("file", f.file)->required();
    bp_flags(s);
  }
  {
    auto* s = add("gen", "Generate a random instance", cmd_gen);
    s->add_option("--seed", f.seed, "Random seed");
    s->add_option("--topology", f.topology, "cycle|ladder|random-regular|tree|random");
    s->add_option("--nodes", f.nodes, "Number of factors (rungs for ladder)");
    s->add_option("--degree", f.degree, "Degree for random-regular");
    s->add_option("--max-edges", f.max_edges, "Edge budget for random");
    s->add_option("--equality-fraction", f.equality_fraction, "Equality node probability");
    s->add_option("--max-equality-degree", f.max_equality_degree, "Largest equality degree");
    s->add_option("--strength", f.strength, "Log-domain coupling bound");
    s->add_flag("--symmetric", f.symmetric, "Degree-2 factors of the form [a,b,b,a]");
    s->add_flag("--non-lsm", f.non_lsm, "Arbitrary non-negative factors");
  }

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action(f, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace nfgcover
