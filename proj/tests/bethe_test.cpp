#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "nfgcover/bethe.hpp"
#include "nfgcover/covers.hpp"
#include "nfgcover/generate.hpp"

using namespace nfgcover;
using nfgcover::testing::c2;
using nfgcover::testing::rel_close;

namespace {

// Bethe free energy of C2 on the local polytope, parameterized by the edge
// marginals p, q and the (0,0) entries x1, x2 of the two factor beliefs.
double c2_free_energy(const std::array<double, 4>& v) {
  const auto [p, q, x1, x2] = v;
  const double inf = std::numeric_limits<double>::infinity();
  const double f[4] = {2, 1, 1, 2};
  double F = 0.0;
  for (double x : {x1, x2}) {
    const double b[4] = {x, p - x, q - x, 1 - p - q + x};
    for (int i = 0; i < 4; ++i) {
      if (b[i] <= 0.0) return inf;
      F += b[i] * std::log(b[i] / f[i]);
    }
  }
  for (double m : {p, q}) {
    if (m <= 0.0 || m >= 1.0) return inf;
    F -= m * std::log(m) + (1 - m) * std::log(1 - m);
  }
  return F;
}

// Compass search from a few interior starts.
double minimize_c2_free_energy() {
  double best = std::numeric_limits<double>::infinity();
  for (const std::array<double, 4>& start :
       {std::array<double, 4>{0.5, 0.5, 0.25, 0.25}, {0.3, 0.6, 0.2, 0.1}, {0.7, 0.4, 0.3, 0.35}}) {
    std::array<double, 4> x = start;
    double fx = c2_free_energy(x);
    for (double step = 0.05; step > 1e-12;) {
      bool moved = false;
      for (int k = 0; k < 4; ++k) {
        for (double dir : {step, -step}) {
          std::array<double, 4> y = x;
          y[static_cast<std::size_t>(k)] += dir;
          const double fy = c2_free_energy(y);
          if (fy < fx) {
            x = y;
            fx = fy;
            moved = true;
          }
        }
      }
      if (!moved) step *= 0.5;
    }
    best = std::min(best, fx);
  }
  return best;
}

Nfg tree(std::uint64_t seed) {
  GeneratorSpec spec;
  spec.seed = seed;
  spec.topology = Topology::Tree;
  spec.nodes = 2 + static_cast<int>(seed % 7);
  return gen_instance(spec);
}

}  // namespace

TEST(SumProduct, C2BetheValue) {
  const auto states = run_sum_product(c2());
  ASSERT_EQ(states.size(), 1U);
  ASSERT_TRUE(states[0].converged);
  const BetheResult b = bethe_partition_sum(c2(), states[0]);
  EXPECT_NEAR(b.z_bethe, 9.0, 1e-8);
  EXPECT_NEAR(b.free_energy, -std::log(9.0), 1e-9);
}

TEST(SumProduct, C2MatchesDirectMinimization) {
  const double fmin = minimize_c2_free_energy();
  EXPECT_NEAR(std::exp(-fmin), 9.0, 1e-6);
  const auto states = run_sum_product(c2(), BpOptions{.restarts = 5});
  EXPECT_NEAR(bethe_partition_sum(c2(), states).free_energy, fmin, 1e-7);
}

TEST(SumProduct, FixedPointIsStable) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GeneratorSpec spec;
    spec.seed = seed;
    spec.topology = Topology::Random;
    spec.nodes = 3;
    const Nfg n = gen_instance(spec);
    for (const BpState& s : run_sum_product(n, BpOptions{.restarts = 2})) {
      if (s.converged) EXPECT_LT(sweep_residual(n, s), 1e-8) << seed;
    }
  }
}

TEST(SumProduct, DeterministicForFixedSeed) {
  const Nfg n = tree(3);
  BpOptions opts;
  opts.seed = 42;
  opts.restarts = 3;
  const auto a = run_sum_product(n, opts);
  const auto b = run_sum_product(n, opts);
  ASSERT_EQ(a.size(), 4U);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].messages, b[i].messages);
    EXPECT_EQ(a[i].start, static_cast<int>(i));
  }
}

TEST(SumProduct, ExactOnTrees) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Nfg n = tree(seed);
    BpOptions opts;
    opts.damping = 0.0;
    const auto states = run_sum_product(n, opts);
    ASSERT_TRUE(states[0].converged) << seed;
    EXPECT_LE(states[0].iterations, static_cast<int>(n.factors.size()) + 1) << seed;
    const BetheResult b = bethe_partition_sum(n, states);
    EXPECT_TRUE(rel_close(b.z_bethe, partition_sum(n), 1e-8)) << seed;
    EXPECT_TRUE(rel_close(bethe_m(n, 2).value, partition_sum(n), 1e-8)) << seed;
  }
}

TEST(SumProduct, BeliefsAreNormalized) {
  const BetheResult b = bethe_partition_sum(c2(), run_sum_product(c2()));
  for (const auto& bf : b.factor_beliefs) {
    double s = 0.0;
    for (double v : bf) s += v;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  for (const auto& be : b.edge_beliefs) {
    EXPECT_NEAR(be[0], 0.5, 1e-10);
    EXPECT_NEAR(be[1], 0.5, 1e-10);
  }
}

TEST(Ratios, C2Report) {
  const RatioReport r = ratio_report(c2());
  EXPECT_DOUBLE_EQ(r.z, 10.0);
  EXPECT_NEAR(r.z_b2, std::sqrt(91.0), 1e-12);
  EXPECT_NEAR(r.z_b2_census, std::sqrt(91.0), 1e-12);
  EXPECT_NEAR(r.z_bethe, 9.0, 1e-8);
  EXPECT_NEAR(r.r1, 10.0 / 9.0, 1e-8);
  EXPECT_NEAR(r.r1, r.r2 * r.r3, 1e-12);
  EXPECT_TRUE(r.identity_holds);
  EXPECT_TRUE(r.census_agrees);
}
