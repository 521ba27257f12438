//
// Copyright 2026 The Downcode Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//


#include "downcode/generators.h"

#include <cmath>
#include <memory>
#include <random>
#include <set>
#include <vector>

#include "downcode/refinement.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace downcode {
namespace {

double NormalCdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

ClusteredParams Defaults() {
  return test::Unwrap(ClusteredParams::Default(10, 1000, 64));
}

TEST(DeriveSeedTest, DeterministicAndSpread) {
  EXPECT_EQ(DeriveSeed(1, 2), DeriveSeed(1, 2));
  std::set<uint64_t> seen;
  for (uint64_t i = 0; i < 1000; ++i) seen.insert(DeriveSeed(42, i));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(DeriveSeed(1, 0), DeriveSeed(2, 0));
}

TEST(ZetaTest, MatchesNormalMedianAbsoluteDeviation) {
  // The median of |N(0,1)| is the 0.75 quantile.
  const double mad = 0.674489750196082;
  EXPECT_NEAR(Zeta(), 1.0 / mad, 1e-9);
  EXPECT_NEAR(Zeta(), 1.48, 0.005);
}

TEST(ClusteredParamsTest, DefaultEndpoints) {
  ClusteredParams p = Defaults();
  EXPECT_EQ(p.t, 100u);
  EXPECT_DOUBLE_EQ(p.A(1), 65);
  EXPECT_DOUBLE_EQ(p.B(1), 123.4);
  EXPECT_DOUBLE_EQ(p.D(1), 136.6);
  EXPECT_DOUBLE_EQ(p.A(2), 195);
  EXPECT_DOUBLE_EQ(p.A(p.t + 1), 130.0 * p.t + 65);
  EXPECT_DOUBLE_EQ(p.p_big, 0.1);
  EXPECT_TRUE(p.Validate().ok());
}

TEST(ClusteredParamsTest, AsymptoticScaling) {
  ClusteredParams p = test::Unwrap(ClusteredParams::Asymptotic(10, 1000, 64));
  const double log_n = std::log(1000.0);
  EXPECT_NEAR(p.inner_half_width, log_n, 1e-12);
  EXPECT_NEAR(p.sigma_big, Zeta() * log_n, 1e-12);
  EXPECT_NEAR(p.outer_half_width, Zeta() * log_n * log_n, 1e-9);
  EXPECT_NEAR(p.centers[2], 6 * p.outer_half_width, 1e-9);
}

TEST(ClusteredParamsTest, RejectsOverlappingClusters) {
  ClusteredParams p = Defaults();
  p.inner_half_width = 70;
  EXPECT_FALSE(p.Validate().ok());
  EXPECT_FALSE(BuildClusteredHierarchy(p).ok());
  EXPECT_FALSE(ClusteredParams::Default(10, 5, 64).ok());
}

TEST(ClusteredHierarchyTest, Shape) {
  ClusteredParams p = Defaults();
  HierarchyPtr h = test::Unwrap(BuildClusteredHierarchy(p));
  EXPECT_EQ(h->size(), 1 + 3 * p.t);
  EXPECT_EQ(h->children(h->root()).size(), p.t);
  EXPECT_EQ(h->set(*h->Find("H1")), ValueSet::Intervals({{65, 195}}));
  EXPECT_EQ(h->set(*h->Find("H1.big")),
            ValueSet::Intervals({{65, 123.4}, {136.6, 195}}));
  EXPECT_EQ(h->max_depth(), 2);
}

TEST(ClusteredSamplerTest, InnerMassOfBigCoordinates) {
  const double closed = NormalCdf(0.66) - NormalCdf(-0.66);
  EXPECT_NEAR(closed, 0.490, 0.001);
  EXPECT_NEAR(test::BigInnerMass(Defaults(), 200'000, 5), closed, 0.01);
}

TEST(ClusteredSamplerTest, BigFraction) {
  EXPECT_NEAR(test::BigFraction(Defaults(), 100'000, 9), 0.1, 0.005);
}

TEST(ClusteredSamplerTest, SmallRowsStayInside) {
  ClusteredParams p = Defaults();
  auto [x, prov] = test::Unwrap(SampleClustered(p, 77));
  ASSERT_EQ(prov.size(), x.size());
  size_t coords = 0;
  size_t inside = 0;
  for (size_t n = 0; n < x.size(); ++n) {
    if (prov.big[n]) continue;
    const size_t t = prov.latent[n];
    for (size_t d = 0; d < x.dims(); ++d) {
      ++coords;
      inside += x.at(n, d) >= p.B(t) && x.at(n, d) < p.D(t);
    }
  }
  EXPECT_GE(static_cast<double>(inside) / coords, 1 - 1e-5);
}

TEST(ClusteredSamplerTest, SameSeedSameData) {
  ClusteredParams p = test::Unwrap(ClusteredParams::Default(10, 200, 8));
  auto a = test::Unwrap(SampleClustered(p, 3));
  auto b = test::Unwrap(SampleClustered(p, 3));
  auto c = test::Unwrap(SampleClustered(p, 4));
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second.latent, b.second.latent);
  EXPECT_FALSE(a.first == c.first);
}

TEST(ClusteredSamplerTest, CoordinatesAreUncorrelated) {
  ClusteredParams p = test::Unwrap(ClusteredParams::Default(10, 1000, 2));
  std::unique_ptr<RecordDistribution> dist = MakeClusteredDistribution(p);
  std::mt19937_64 rng(13);
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) {
    Latent latent;
    std::vector<Scalar> row = dist->Draw(rng, &latent);
    const double c = p.centers[latent.t - 1];
    const double a = row[0] - c;
    const double b = row[1] - c;
    sx += a;
    sy += b;
    sxx += a * a;
    syy += b * b;
    sxy += a * b;
  }
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double rho = cov / std::sqrt((sxx / n - (sx / n) * (sx / n)) *
                                     (syy / n - (sy / n) * (sy / n)));
  EXPECT_LT(std::abs(rho), 0.02);
}

TEST(PrefixParamsTest, DeskParameters) {
  PrefixParams p = test::Unwrap(PrefixParams::Make(2, 8, 64, 0.1));
  EXPECT_EQ(p.t, 640u);
  EXPECT_DOUBLE_EQ(p.p_spike, 0.25);
  EXPECT_FALSE(PrefixParams::Make(2, 8, 64, 0).ok());
  EXPECT_EQ(test::Unwrap(PrefixParams::Make(2, 3, 4, 1.0)).t, 9u);
}

TEST(PrefixSamplerTest, SpikeCountsAndColumnMeans) {
  PrefixParams p = test::Unwrap(PrefixParams::Make(2, 8, 64, 0.1));
  p.n = 10'000;
  auto [x, prov] = test::Unwrap(SamplePrefix(p, 21));
  double nonzero = 0;
  std::vector<double> col(p.d, 0);
  for (size_t n = 0; n < x.size(); ++n) {
    for (size_t d = 0; d < p.d; ++d) {
      const Scalar v = x.at(n, d);
      EXPECT_TRUE(v == 0 || v == prov.latent[n]);
      nonzero += v != 0;
      col[d] += v;
    }
  }
  const double rows = static_cast<double>(x.size());
  // Binomial(D, 1/4) per row.
  const double sd_mean = std::sqrt(p.d * 0.25 * 0.75 / rows);
  EXPECT_NEAR(nonzero / rows, p.d / 4.0, 3 * sd_mean);
  // x_d = t B with t uniform on [1,T] and B ~ Bernoulli(1/4).
  const double mean = 0.25 * (p.t + 1) / 2.0;
  const double ex2 = 0.25 * (p.t + 1) * (2.0 * p.t + 1) / 6.0;
  const double sd_col = std::sqrt((ex2 - mean * mean) / rows);
  for (size_t d = 0; d < 8; ++d) {
    EXPECT_NEAR(col[d] / rows, mean, 4 * sd_col) << "column " << d;
  }
}

TEST(PrefixSamplerTest, AllZeroRowProbability) {
  const double closed = std::pow(1 - 1.0 / 4, 64);
  EXPECT_NEAR(closed, 1.01e-8, 0.01e-8);
  EXPECT_LE(closed, std::exp(-64.0 / 4));
}

TEST(PrefixSamplerTest, SameSeedSameData) {
  PrefixParams p = test::Unwrap(PrefixParams::Make(2, 8, 64, 0.1));
  EXPECT_EQ(test::Unwrap(SamplePrefix(p, 5)).first,
            test::Unwrap(SamplePrefix(p, 5)).first);
}

TEST(PrefixHierarchyTest, RejectsZero) {
  EXPECT_FALSE(BuildPrefixHierarchy(0).ok());
  EXPECT_EQ(test::Unwrap(BuildPrefixHierarchy(1))->size(), 3u);
}

TEST(CollisionTest, Examples) {
  SampleProvenance prov;
  prov.kind = SampleProvenance::Kind::kPrefix;
  prov.latent = {3, 5};
  EXPECT_TRUE(test::Unwrap(IsCollisionFree(prov)));
  prov.latent = {7, 7};
  EXPECT_FALSE(test::Unwrap(IsCollisionFree(prov)));
  prov.kind = SampleProvenance::Kind::kClustered;
  EXPECT_FALSE(IsCollisionFree(prov).ok());
}

TEST(CollisionTest, BirthdayRate) {
  const double expected = test::BirthdayCollision(8, 640);
  EXPECT_NEAR(expected, 0.043, 0.001);
  PrefixParams p = test::Unwrap(PrefixParams::Make(2, 8, 64, 0.1));
  EXPECT_NEAR(test::CollisionRate(p, 10'000, 99), expected, 0.01);
}

TEST(ClassifyClustersTest, CraftedClusters) {
  ClusteredParams p = test::Unwrap(ClusteredParams::Default(2, 6, 2));
  // Cluster 1: one big and one small row. Cluster 2: two big rows.
  // Cluster 3: empty.
  Dataset x = test::Unwrap(Dataset::FromRows({{130, 131},
                                              {130, 100},
                                              {260, 220},
                                              {230, 261}}));
  SampleProvenance prov;
  prov.latent = {1, 1, 2, 2};
  prov.big = {false, true, true, true};
  std::vector<ClusterInfo> info =
      test::Unwrap(ClassifyClusters(x, prov, p));
  ASSERT_EQ(info.size(), 3u);
  EXPECT_EQ(info[0].size, 2u);
  EXPECT_EQ(info[0].big_count, 1u);
  EXPECT_TRUE(info[0].x_good);
  EXPECT_EQ(info[1].big_count, 2u);
  EXPECT_FALSE(info[1].x_good);
  EXPECT_EQ(info[2].size, 0u);
  EXPECT_FALSE(info[2].x_good);
}

TEST(ClassifyClustersTest, GoodClusterRate) {
  ClusteredParams p = Defaults();
  size_t good = 0;
  size_t clusters = 0;
  for (uint64_t s = 0; s < 20; ++s) {
    auto [x, prov] = test::Unwrap(SampleClustered(p, DeriveSeed(500, s)));
    for (const ClusterInfo& c : test::Unwrap(ClassifyClusters(x, prov, p))) {
      good += c.x_good;
      ++clusters;
    }
  }
  EXPECT_NEAR(static_cast<double>(good) / clusters, 0.048, 0.01);
}

TEST(BoxProbabilityTest, PrefixSpike) {
  PrefixParams p = test::Unwrap(PrefixParams::Make(2, 2, 2, 1.0));
  p.t = 5;
  HierarchyPtr h = test::Unwrap(BuildPrefixHierarchy(5));
  std::unique_ptr<RecordDistribution> dist = MakePrefixDistribution(p);
  const std::vector<Cell> box = {Cell::Exact(5), Cell::Exact(0)};
  EXPECT_NEAR(dist->BoxProbability({h, h}, box), 0.0375, 1e-12);
  const std::vector<Cell> root = {h->RootCell(), h->RootCell()};
  EXPECT_NEAR(dist->BoxProbability({h, h}, root), 1.0, 1e-12);
}

}  // namespace
}  // namespace downcode
