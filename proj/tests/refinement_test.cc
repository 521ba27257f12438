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


#include "downcode/refinement.h"

#include <random>
#include <vector>

#include "downcode/generators.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace downcode {
namespace {

using ::testing::ElementsAre;

TEST(RefinesTest, DowncodedRowIsStrict) {
  test::ZipIncomeFixture f = test::MakeZipIncome();
  auto r = Refines(f.hierarchies, f.z.row(0), f.y.row(0));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->relation, Relation::kStrict);
  EXPECT_THAT(r->refined_dims, ElementsAre(0, 1));
}

TEST(RefinesTest, EqualAndIncomparable) {
  test::ZipIncomeFixture f = test::MakeZipIncome();
  EXPECT_EQ(test::Unwrap(Refines(f.hierarchies, f.y.row(0), f.y.row(0)))
                .relation,
            Relation::kEqual);
  HierarchyPtr h = test::FlatFinite({1, 2});
  const std::vector<Cell> two = {Cell::Exact(2)};
  const std::vector<Cell> one = {Cell::Exact(1)};
  EXPECT_EQ(test::Unwrap(Refines({h}, two, one)).relation,
            Relation::kIncomparable);
  EXPECT_FALSE(Refines({h}, two, f.y.row(0)).ok());
}

TEST(DatasetRefinesTest, CountsRefinedRowsAndDims) {
  test::ZipIncomeFixture f = test::MakeZipIncome();
  DatasetRefinementReport r = test::Unwrap(DatasetRefines(f.z, f.y));
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.delta_n, 4u);
  EXPECT_EQ(r.min_delta_d, 1u);

  DatasetRefinementReport same = test::Unwrap(DatasetRefines(f.y, f.y));
  EXPECT_TRUE(same.holds);
  EXPECT_EQ(same.delta_n, 0u);
  EXPECT_EQ(same.min_delta_d, 0u);
}

TEST(DatasetRefinesTest, EnlargedCellBreaksContainment) {
  test::ZipIncomeFixture f = test::MakeZipIncome();
  GeneralizedDataset z = f.z;
  z.set(3, 1, f.hierarchies[1]->RootCell());
  EXPECT_FALSE(test::Unwrap(DatasetRefines(z, f.y)).holds);
}

TEST(DatasetRefinesTest, ShapeMismatch) {
  test::ZipIncomeFixture f = test::MakeZipIncome();
  GeneralizedDataset shorter(f.hierarchies, 5);
  EXPECT_FALSE(DatasetRefines(shorter, f.y).ok());
}

TEST(GeneralizesTest, DowncodingStillGeneralizesSecretData) {
  test::ZipIncomeFixture f = test::MakeZipIncome();
  EXPECT_TRUE(test::Unwrap(GeneralizesDataset(f.z, f.x)));
  EXPECT_TRUE(test::Unwrap(GeneralizesDataset(f.y, f.x)));
  EXPECT_TRUE(
      test::Unwrap(GeneralizesDataset(EmbedExact(f.x, f.hierarchies), f.x)));
  GeneralizedDataset wrong = f.z;
  wrong.set(0, 0, Cell::Exact(91011));
  EXPECT_FALSE(test::Unwrap(GeneralizesDataset(wrong, f.x)));
}

TEST(GeneralizesTest, MatchingWithinClassesIgnoresRowOrder) {
  test::ZipIncomeFixture f = test::MakeZipIncome();
  GeneralizedDataset swapped = f.z;
  swapped.SetRow(0, f.z.row(2));
  swapped.SetRow(2, f.z.row(0));
  EXPECT_FALSE(test::Unwrap(GeneralizesDataset(swapped, f.x)));
  EXPECT_TRUE(test::Unwrap(GeneralizesWithinClasses(swapped, f.x, f.y)));

  // Rows 0 and 3 sit in different classes of y.
  GeneralizedDataset crossed = f.z;
  crossed.SetRow(0, f.z.row(3));
  crossed.SetRow(3, f.z.row(0));
  EXPECT_FALSE(test::Unwrap(GeneralizesWithinClasses(crossed, f.x, f.y)));
}

TEST(EffectiveAnonymityTest, ThreeAnonymousTable) {
  test::ZipIncomeFixture f = test::MakeZipIncome();
  const QuasiIdentifier all = QuasiIdentifier::All(3);
  for (size_t n = 0; n < f.y.size(); ++n) {
    EXPECT_EQ(test::Unwrap(EffectiveAnonymity(f.y, n, all)), 3u);
  }
  EXPECT_THAT(EquivalenceClasses(f.y, all),
              ElementsAre(ElementsAre(0, 1, 2), ElementsAre(3, 4, 5)));
  EXPECT_TRUE(test::Unwrap(IsKAnonymous(f.y, 3, all)));
  EXPECT_FALSE(test::Unwrap(IsKAnonymous(f.z, 3, all)));
  EXPECT_FALSE(EffectiveAnonymity(f.y, 6, all).ok());
}

TEST(EffectiveAnonymityTest, QuasiIdentifierSubset) {
  test::ZipIncomeFixture f = test::MakeZipIncome();
  QuasiIdentifier zip_only{{0}, "zip"};
  EXPECT_EQ(test::Unwrap(EffectiveAnonymity(f.z, 0, zip_only)), 1u);
  EXPECT_EQ(test::Unwrap(EffectiveAnonymity(f.z, 1, zip_only)), 2u);
  EXPECT_EQ(test::Unwrap(EffectiveAnonymity(f.z, 5, zip_only)), 3u);
  EXPECT_FALSE(QuasiIdentifier({{3}, "bad"}).Validate(3).ok());
  EXPECT_FALSE(QuasiIdentifier({{}, "empty"}).Validate(3).ok());
}

TEST(EffectiveAnonymityTest, SingleRow) {
  HierarchyPtr h = test::FlatFinite({0, 1});
  GeneralizedDataset y(std::vector<HierarchyPtr>{h}, 1);
  EXPECT_EQ(test::Unwrap(EffectiveAnonymity(y, 0, QuasiIdentifier::All(1))),
            1u);
}

TEST(EffectiveAnonymityTest, MatchesPairwiseOracleOnRandomData) {
  std::mt19937_64 rng(11);
  HierarchyPtr h = test::Unwrap(BuildPrefixHierarchy(3));
  const std::vector<HierarchyPtr> hs = {h, h};
  std::uniform_int_distribution<NodeIndex> node(0, h->size() - 1);
  std::uniform_int_distribution<int> value(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<GeneralizedRecord> rows;
    for (int n = 0; n < 8; ++n) {
      GeneralizedRecord r;
      for (int d = 0; d < 2; ++d) {
        r.push_back(rng() % 2 ? Cell::Exact(value(rng))
                              : h->Canonical(Cell::Node(node(rng))));
      }
      rows.push_back(r);
    }
    GeneralizedDataset y = test::Unwrap(GeneralizedDataset::Create(hs, rows));
    const QuasiIdentifier all = QuasiIdentifier::All(2);
    std::vector<size_t> fast = EffectiveAnonymities(y, all);
    for (size_t n = 0; n < y.size(); ++n) {
      EXPECT_EQ(fast[n], test::BruteForceEa(y, n, {0, 1}));
      EXPECT_EQ(test::Unwrap(EffectiveAnonymity(y, n, QuasiIdentifier{{1}, "q"})),
                test::BruteForceEa(y, n, {1}));
    }
  }
}

TEST(IsKAnonymousTest, EmptyAndInvalidK) {
  HierarchyPtr h = test::FlatFinite({0, 1});
  GeneralizedDataset empty(std::vector<HierarchyPtr>{h}, 0);
  EXPECT_TRUE(test::Unwrap(IsKAnonymous(empty, 5, QuasiIdentifier::All(1))));
  EXPECT_FALSE(IsKAnonymous(empty, 1, QuasiIdentifier::All(1)).ok());
}

TEST(LeastCommonNodeTest, Examples) {
  HierarchyPtr prefix = test::Unwrap(BuildPrefixHierarchy(5));
  const std::vector<Scalar> zero_three = {0, 3};
  EXPECT_EQ(test::Unwrap(LeastCommonNode(*prefix, zero_three)),
            Cell::Node(*prefix->Find("[0,3]")));
  const std::vector<Scalar> zero_two = {0, 2};
  EXPECT_EQ(test::Unwrap(LeastCommonNode(*prefix, zero_two)),
            Cell::Node(*prefix->Find("[0,2]")));
  const std::vector<Scalar> single = {4};
  EXPECT_EQ(test::Unwrap(LeastCommonNode(*prefix, single)), Cell::Exact(4));

  ClusteredParams p = test::Unwrap(ClusteredParams::Default(10, 1000, 64));
  HierarchyPtr clustered = test::Unwrap(BuildClusteredHierarchy(p));
  const std::vector<Scalar> spread = {p.centers[0] - 1, p.centers[1] + 1};
  EXPECT_EQ(test::Unwrap(LeastCommonNode(*clustered, spread)),
            clustered->RootCell());
  const std::vector<Scalar> outside = {0, 9};
  EXPECT_FALSE(LeastCommonNode(*prefix, outside).ok());
}

// Refinement is a partial order on canonical cells.
TEST(RefinesTest, PartialOrderLaws) {
  HierarchyPtr h = test::Unwrap(BuildPrefixHierarchy(4));
  std::vector<Cell> cells;
  for (NodeIndex n = 0; n < h->size(); ++n) {
    cells.push_back(h->Canonical(Cell::Node(n)));
  }
  for (int v = 0; v <= 4; ++v) cells.push_back(Cell::Exact(v));
  const std::vector<HierarchyPtr> hs = {h};
  auto rel = [&](Cell a, Cell b) {
    const std::vector<Cell> ra = {a};
    const std::vector<Cell> rb = {b};
    return test::Unwrap(Refines(hs, ra, rb)).relation;
  };
  for (Cell a : cells) {
    EXPECT_EQ(rel(a, a), Relation::kEqual);
    for (Cell b : cells) {
      const Relation ab = rel(a, b);
      if (ab != Relation::kIncomparable && rel(b, a) != Relation::kIncomparable) {
        EXPECT_EQ(a, b);
      }
      for (Cell c : cells) {
        if (ab != Relation::kIncomparable &&
            rel(b, c) != Relation::kIncomparable) {
          EXPECT_NE(rel(a, c), Relation::kIncomparable);
        }
      }
    }
  }
}

}  // namespace
}  // namespace downcode
