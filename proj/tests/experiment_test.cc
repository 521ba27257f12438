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


#include "downcode/experiment.h"

#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "nlohmann/json.hpp"
#include "test_util.h"

namespace downcode {
namespace {

using ::testing::HasSubstr;

nlohmann::json PrefixConfig() {
  return nlohmann::json::parse(R"({
    "schema": "downcode-lab/1",
    "name": "small-prefix",
    "theorem": "thm2",
    "distribution": {"kind": "prefix", "k": 2, "n": 8, "d": 16, "alpha": 0.1},
    "anonymizer": {"k": 2, "strategy": "lca", "seed": 0},
    "trials": 12,
    "thresholds": {"delta_n": 8, "delta_d": 1},
    "mc_samples": 2000,
    "weight_threshold": 0.01,
    "min_predicates": 8,
    "master_seed": 7,
    "acceptance": {"min_collision_free_success": 0.5}
  })");
}

ExperimentConfig Parse(const nlohmann::json& j) {
  return test::Unwrap(ParseExperimentConfig(j.dump()));
}

TEST(TheoremTest, Names) {
  EXPECT_EQ(test::Unwrap(ParseTheorem("thm3")), Theorem::kThm3);
  EXPECT_EQ(TheoremName(Theorem::kThm4), "thm4");
  EXPECT_TRUE(UsesClustered(Theorem::kThm1));
  EXPECT_FALSE(UsesClustered(Theorem::kThm2));
  EXPECT_FALSE(ParseTheorem("thm5").ok());
}

TEST(ConfigTest, ParsesPrefixConfig) {
  ExperimentConfig cfg = Parse(PrefixConfig());
  EXPECT_EQ(cfg.theorem, Theorem::kThm2);
  EXPECT_EQ(cfg.prefix.t, 640u);
  EXPECT_EQ(cfg.prefix.d, 16u);
  EXPECT_EQ(cfg.anonymizer.strategy, Strategy::kLcaPartition);
  EXPECT_EQ(cfg.trials, 12u);
  EXPECT_EQ(cfg.acceptance.min_collision_free_success, 0.5);
  EXPECT_FALSE(cfg.acceptance.min_daleth.has_value());
}

TEST(ConfigTest, RejectsBadConfigs) {
  nlohmann::json j = PrefixConfig();
  j["trials"] = 0;
  EXPECT_FALSE(ParseExperimentConfig(j.dump()).ok());

  j = PrefixConfig();
  j["thresholds"]["delta_d"] = 17;
  EXPECT_FALSE(ParseExperimentConfig(j.dump()).ok());

  j = PrefixConfig();
  j["surprise"] = 1;
  auto bad = ParseExperimentConfig(j.dump());
  ASSERT_FALSE(bad.ok());
  EXPECT_THAT(bad.status().message(), HasSubstr("surprise"));

  j = PrefixConfig();
  j["anonymizer"]["k"] = 3;
  EXPECT_FALSE(ParseExperimentConfig(j.dump()).ok());

  j = PrefixConfig();
  j["distribution"]["kind"] = "clustered";
  EXPECT_FALSE(ParseExperimentConfig(j.dump()).ok());

  j = PrefixConfig();
  j["schema"] = "other/2";
  EXPECT_FALSE(ParseExperimentConfig(j.dump()).ok());

  EXPECT_FALSE(ParseExperimentConfig("{not json").ok());
}

TEST(WilsonTest, Interval) {
  Proportion p = WilsonInterval(9, 10);
  EXPECT_DOUBLE_EQ(p.rate, 0.9);
  EXPECT_NEAR(p.lo, 0.5958, 1e-3);
  EXPECT_NEAR(p.hi, 0.9821, 1e-3);
  Proportion none = WilsonInterval(0, 0);
  EXPECT_EQ(none.total, 0u);
  EXPECT_GE(WilsonInterval(0, 5).lo, 0.0);
  EXPECT_LE(WilsonInterval(5, 5).hi, 1.0);
}

TEST(VerifyStructureTest, ToyPrefixConforms) {
  test::ToyPrefixFixture f = test::MakeToyPrefix();
  StructureReport r =
      test::Unwrap(VerifyStructure(f.y, f.x, StructureMode::kClaim2, 2));
  EXPECT_EQ(r.cells, 4u);
  EXPECT_EQ(r.conforming, 4u);
  EXPECT_DOUBLE_EQ(r.conformity(), 1.0);

  GeneralizedDataset loose = f.y;
  loose.set(0, 1, f.hierarchies[1]->RootCell());
  loose.set(1, 1, f.hierarchies[1]->RootCell());
  r = test::Unwrap(VerifyStructure(loose, f.x, StructureMode::kClaim2, 2));
  EXPECT_EQ(r.conforming, 2u);

  test::BinaryFixture b = test::MakeBinary();
  EXPECT_FALSE(
      VerifyStructure(b.top, b.x, StructureMode::kClaim1, 2).ok());
}

TEST(ExperimentTest, PrefixCampaignIsConsistent) {
  ExperimentConfig cfg = Parse(PrefixConfig());
  ExperimentReport report = test::Unwrap(RunExperiment(cfg));
  ASSERT_EQ(report.trials.size(), 12u);
  EXPECT_EQ(report.errors, 0u);
  size_t hits = 0;
  size_t cf = 0;
  for (const TrialRecord& t : report.trials) {
    EXPECT_TRUE(t.ok()) << t.error;
    ASSERT_TRUE(t.collision_free.has_value());
    cf += *t.collision_free;
    hits += t.success;
    if (t.success) {
      EXPECT_TRUE(t.valid);
      EXPECT_TRUE(t.refinement.holds);
      EXPECT_EQ(t.refinement.delta_n, 8u);
    }
  }
  EXPECT_EQ(report.daleth.hits, hits);
  EXPECT_EQ(report.daleth.total, 12u);
  EXPECT_EQ(report.collision_free.hits, cf);
  EXPECT_DOUBLE_EQ(report.claim2_conformity, 1.0);
  EXPECT_GE(report.daleth.rate, 0.0);
  EXPECT_LE(report.daleth.rate, 1.0);
}

TEST(ExperimentTest, ReportIndependentOfWorkers) {
  ExperimentConfig cfg = Parse(PrefixConfig());
  cfg.trials = 6;
  const std::string one = ReportToJson(test::Unwrap(RunExperiment(cfg, {1})));
  const std::string three =
      ReportToJson(test::Unwrap(RunExperiment(cfg, {3})));
  EXPECT_EQ(one, three);
  nlohmann::json j = nlohmann::json::parse(one);
  EXPECT_EQ(j["schema"], "downcode-lab/1");
  EXPECT_EQ(j["trials"].size(), 6u);
}

TEST(ExperimentTest, PsoCampaignOnPrefixData) {
  nlohmann::json j = PrefixConfig();
  j["theorem"] = "thm4";
  j["trials"] = 8;
  j["acceptance"] = {{"min_pso_success", 0.5}, {"min_disjoint_rate", 1.0}};
  ExperimentReport report = test::Unwrap(RunExperiment(Parse(j)));
  EXPECT_EQ(report.pairwise_disjoint.hits, report.pairwise_disjoint.total);
  EXPECT_GT(report.predicates, 0u);
  EXPECT_GT(report.mc_checks, 0u);
  EXPECT_LT(report.mc_max_abs_error, 0.02);
  size_t emitted = 0;
  for (const TrialRecord& t : report.trials) emitted += t.pso.size();
  EXPECT_EQ(emitted, report.predicates);
  std::vector<GateResult> gates = EvaluateGates(report);
  ASSERT_EQ(gates.size(), 2u);
  EXPECT_TRUE(gates[1].pass);
}

TEST(ExperimentTest, ClusteredCampaignSmoke) {
  nlohmann::json j = nlohmann::json::parse(R"({
    "schema": "downcode-lab/1",
    "name": "small-clustered",
    "theorem": "thm1",
    "distribution": {"kind": "clustered", "mode": "default", "k": 10,
                     "n": 300, "d": 16},
    "anonymizer": {"k": 10, "strategy": "lca", "seed": 0},
    "trials": 2,
    "thresholds": {"delta_n": 1, "delta_d": 6},
    "master_seed": 3
  })");
  ExperimentReport report = test::Unwrap(RunExperiment(Parse(j)));
  EXPECT_EQ(report.errors, 0u);
  EXPECT_LE(report.claim1_max_nonconfined, 1u);
  for (const TrialRecord& t : report.trials) {
    EXPECT_TRUE(t.refinement.holds);
    EXPECT_FALSE(t.collision_free.has_value());
  }
}

}  // namespace
}  // namespace downcode
