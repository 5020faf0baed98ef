#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "fixtures.hpp"
#include "nfgcover/covers.hpp"
#include "nfgcover/error.hpp"
#include "nfgcover/generate.hpp"

using namespace nfgcover;
using nfgcover::testing::brute_force_z;
using nfgcover::testing::c2;
using nfgcover::testing::rel_close;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an nfgcover::Error";
  return ErrorKind::Io;
}

// Every M-cover of C2 is a disjoint union of cycles of [2,1,1,2] factors. A
// cycle through L copies of f1 has 2L factors and contributes
// tr(A^(2L)) = 3^(2L) + 1, where L runs over the cycles of perm2^-1 o perm1.
double c2_cover_oracle(const std::vector<int>& p1, const std::vector<int>& p2) {
  const std::size_t M = p1.size();
  std::vector<int> inv2(M);
  for (std::size_t i = 0; i < M; ++i) inv2[static_cast<std::size_t>(p2[i])] = static_cast<int>(i);
  std::vector<bool> seen(M, false);
  double z = 1.0;
  for (std::size_t s = 0; s < M; ++s) {
    if (seen[s]) continue;
    int len = 0;
    for (std::size_t i = s; !seen[i]; i = static_cast<std::size_t>(inv2[static_cast<std::size_t>(p1[i])])) {
      seen[i] = true;
      ++len;
    }
    z *= std::pow(3.0, 2 * len) + 1.0;
  }
  return z;
}

Nfg small_random(std::uint64_t seed, bool lsm) {
  GeneratorSpec spec;
  spec.seed = seed;
  spec.topology = Topology::Random;
  spec.nodes = 2 + static_cast<int>(seed % 3);
  spec.max_edges = 5;
  spec.lsm = lsm;
  return gen_instance(spec);
}

}  // namespace

TEST(Cover, TrivialCoverIsDisjointCopies) {
  for (int M = 1; M <= 3; ++M) {
    const Nfg cover = build_cover(c2(), trivial_cover(c2(), M));
    EXPECT_EQ(cover.factors.size(), static_cast<std::size_t>(2 * M));
    EXPECT_EQ(cover.edges.size(), static_cast<std::size_t>(2 * M));
    EXPECT_DOUBLE_EQ(partition_sum(cover), std::pow(10.0, M));
  }
}

TEST(Cover, DoubleCoversOfC2) {
  const std::vector<double> expected = {100, 82, 82, 100};
  for (std::uint64_t mask = 0; mask < 4; ++mask) {
    const CoverSpec spec = double_cover_from_mask(c2(), mask);
    EXPECT_EQ(crossed_mask(c2(), spec), mask);
    const Nfg cover = build_cover(c2(), spec);
    EXPECT_TRUE(validate(cover).empty());
    EXPECT_DOUBLE_EQ(partition_sum(cover), expected[mask]);
    EXPECT_DOUBLE_EQ(brute_force_z(cover), expected[mask]);
  }
}

TEST(Cover, NamingAndCopyMajorOrder) {
  const Nfg cover = build_cover(c2(), trivial_cover(c2(), 2));
  EXPECT_EQ(cover.factors[0].id, "f1#0");
  EXPECT_EQ(cover.factors[1].id, "f2#0");
  EXPECT_EQ(cover.factors[2].id, "f1#1");
  EXPECT_TRUE(cover.edge_index("e1#1").has_value());
}

TEST(Cover, TripleCoversOfC2MatchCycleOracle) {
  std::size_t count = 0;
  enumerate_covers(c2(), 3, [&](const CoverSpec& spec) {
    ++count;
    const double z = partition_sum(build_cover(c2(), spec));
    EXPECT_TRUE(rel_close(z, c2_cover_oracle(spec.perms.at("e1"), spec.perms.at("e2"))));
  });
  EXPECT_EQ(count, 36U);
}

TEST(Cover, EnumerationCounts) {
  EXPECT_EQ(all_double_covers(c2()).size(), 4U);
  std::set<std::map<std::string, std::vector<int>>> distinct;
  enumerate_covers(c2(), 3, [&](const CoverSpec& s) { distinct.insert(s.perms); });
  EXPECT_EQ(distinct.size(), 36U);
  EXPECT_EQ(kind_of([] { all_double_covers(c2(), EnumerationOptions{3}); }),
            ErrorKind::EnumerationCapExceeded);
}

TEST(Cover, SamplingIsDeterministicAndWellFormed) {
  const Nfg n = small_random(4, false);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CoverSpec a = sample_cover(n, 4, seed);
    EXPECT_EQ(a, sample_cover(n, 4, seed));
    EXPECT_NO_THROW(check_cover_spec(n, a));
  }
}

TEST(Cover, CrossingFrequencyIsHalf) {
  int crossed = 0;
  const int trials = 10000;
  for (int seed = 0; seed < trials; ++seed) {
    crossed += sample_cover(c2(), 2, static_cast<std::uint64_t>(seed)).perms.at("e1")[0];
  }
  EXPECT_NEAR(static_cast<double>(crossed) / trials, 0.5, 0.02);
}

TEST(Cover, UniformBelowStaysInRange) {
  Rng rng(1);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) ++hits[uniform_below(rng, 7)];
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Cover, ErrorKinds) {
  Nfg h = c2();
  h.edges.push_back({"h", 2, true});
  h.factors.push_back({"g", {"h"}, DenseTensor({2}, {1, 1})});
  EXPECT_EQ(kind_of([&] { trivial_cover(h, 2); }), ErrorKind::HalfEdgePresent);
  EXPECT_EQ(kind_of([] { trivial_cover(c2(), 0); }), ErrorKind::WrongM);

  CoverSpec bad = trivial_cover(c2(), 2);
  bad.perms["e1"] = {0, 0};
  EXPECT_EQ(kind_of([&] { build_cover(c2(), bad); }), ErrorKind::MalformedPermutation);
  bad.perms.erase("e1");
  EXPECT_EQ(kind_of([&] { build_cover(c2(), bad); }), ErrorKind::MalformedPermutation);
  CoverSpec extra = trivial_cover(c2(), 2);
  extra.perms["zz"] = {0, 1};
  EXPECT_EQ(kind_of([&] { build_cover(c2(), extra); }), ErrorKind::MalformedPermutation);
}

TEST(Cover, RelabelingCopiesLeavesZUnchanged) {
  Rng rng(11);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Nfg n = small_random(seed, false);
    const CoverSpec spec = sample_cover(n, 3, seed);
    const double z = partition_sum(build_cover(n, spec));
    const auto slots = edge_slots(n);
    const std::size_t f = uniform_below(rng, n.factors.size());
    std::vector<int> tau = {0, 1, 2};
    std::shuffle(tau.begin(), tau.end(), rng);
    CoverSpec moved = spec;
    for (std::size_t e = 0; e < n.edges.size(); ++e) {
      const auto& p = spec.perms.at(n.edges[e].id);
      std::vector<int> q(3);
      for (std::size_t i = 0; i < 3; ++i) {
        const int from = slots[e][0].factor == f ? tau[i] : static_cast<int>(i);
        const int to = slots[e][1].factor == f ? tau[static_cast<std::size_t>(p[i])] : p[i];
        q[static_cast<std::size_t>(from)] = to;
      }
      moved.perms[n.edges[e].id] = q;
    }
    EXPECT_TRUE(rel_close(partition_sum(build_cover(n, moved)), z)) << seed;
  }
}

TEST(BetheM, ExactValuesOnC2) {
  EXPECT_DOUBLE_EQ(bethe_m(c2(), 1).value, 10.0);
  const BetheMEstimate b2 = bethe_m(c2(), 2);
  EXPECT_NEAR(b2.value, std::sqrt(91.0), 1e-12);
  EXPECT_DOUBLE_EQ(b2.mean_z, 91.0);
  // Oracle mean over the 36 triple covers: (1000 + 3*820 + 2*730) / 6.
  EXPECT_NEAR(bethe_m(c2(), 3).value, std::cbrt(820.0), 1e-10);
}

TEST(BetheM, MonteCarloWithinThreeStandardErrors) {
  CoverOptions opts;
  opts.mode = CoverMode::MonteCarlo;
  opts.samples = 2000;
  opts.seed = 5;
  const BetheMEstimate mc = bethe_m(c2(), 3, opts);
  EXPECT_EQ(mc.samples, 2000U);
  EXPECT_GT(mc.stderr_value, 0.0);
  EXPECT_LE(std::abs(mc.value - std::cbrt(820.0)), 3.0 * mc.stderr_value);
  EXPECT_EQ(bethe_m(c2(), 3, opts).value, mc.value);
}

TEST(BetheM, ThreadCountDoesNotChangeResult) {
  const Nfg n = small_random(2, false);
  CoverOptions one;
  CoverOptions many;
  many.threads = 4;
  EXPECT_TRUE(rel_close(bethe_m(n, 2, one).value, bethe_m(n, 2, many).value, 1e-12));
  const auto a = double_cover_census(n, 1);
  const auto b = double_cover_census(n, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].bitmask, i);
    EXPECT_EQ(a[i].z, b[i].z);
  }
}

TEST(Ruozzi, HoldsOnLogSupermodularGraphs) {
  const RuozziReport r = check_ruozzi(c2(), 2);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.covers_checked, 4U);
  EXPECT_DOUBLE_EQ(r.max_ratio, 1.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EXPECT_TRUE(check_ruozzi(small_random(seed, true), 2).passed()) << seed;
  }
}

TEST(Ruozzi, RejectsNonLogSupermodularInput) {
  Nfg n = c2();
  n.factors[0].tensor = DenseTensor({2, 2}, {1, 2, 2, 1});
  EXPECT_EQ(kind_of([&] { check_ruozzi(n, 2); }), ErrorKind::NotLogSupermodular);
}
