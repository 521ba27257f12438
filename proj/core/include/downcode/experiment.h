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

#ifndef DOWNCODE_EXPERIMENT_H_
#define DOWNCODE_EXPERIMENT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "downcode/anonymizer.h"
#include "downcode/attacks.h"
#include "downcode/dataset.h"
#include "downcode/generators.h"
#include "downcode/refinement.h"

namespace downcode {

inline constexpr std::string_view kReportSchema = "downcode-lab/1";

// thm1/thm3 run on clustered data, thm2/thm4 on prefix data. thm1/thm2
// score downcoding, thm3/thm4 score predicate sets.
enum class Theorem { kThm1, kThm2, kThm3, kThm4 };

absl::StatusOr<Theorem> ParseTheorem(std::string_view name);
std::string_view TheoremName(Theorem theorem);
bool UsesClustered(Theorem theorem);

// Pass/fail gates checked after a campaign; unset gates are skipped.
struct AcceptanceGates {
  std::optional<double> min_daleth;
  std::optional<double> min_collision_free_success;
  std::optional<double> min_mean_downcoded;
  std::optional<double> min_valid_rate;
  std::optional<double> min_isolation_rate;
  std::optional<double> min_pso_success;
  std::optional<double> min_disjoint_rate;
};

struct ExperimentConfig {
  std::string name;
  Theorem theorem = Theorem::kThm2;
  ClusteredParams clustered;
  PrefixParams prefix;
  AnonymizerConfig anonymizer;
  size_t trials = 1;
  size_t delta_n = 1;
  size_t delta_d = 1;
  uint64_t mc_samples = 0;
  // Predicates per trial checked by sampling; 0 checks all of them.
  size_t mc_spot_checks = 0;
  double weight_threshold = 1e-3;
  size_t min_predicates = 1;
  uint64_t master_seed = 0;
  AcceptanceGates acceptance;

  absl::Status Validate() const;
};

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(std::string_view json);

enum class StructureMode { kClaim1, kClaim2 };

struct StructureReport {
  // kClaim2: cells equal to [0, class max] or the exact class max.
  size_t cells = 0;
  size_t conforming = 0;
  // kClaim1: clusters with exactly k rows, and those whose published rows
  // leave the cluster box.
  size_t size_k_clusters = 0;
  size_t nonconfined = 0;

  double conformity() const {
    return cells == 0 ? 1.0 : static_cast<double>(conforming) / cells;
  }
};

absl::StatusOr<StructureReport> VerifyStructure(const GeneralizedDataset& y,
                                                const Dataset& x,
                                                StructureMode mode, size_t k);

struct TrialRecord {
  size_t index = 0;
  uint64_t seed = 0;
  std::string error;
  std::optional<bool> collision_free;
  size_t downcoded = 0;
  std::vector<ClusterAudit> audit;
  DatasetRefinementReport refinement;
  // X fits Z with rows matched inside each published class.
  bool valid = false;
  bool success = false;
  StructureReport structure;
  // |D^t| of each singled-out spike record.
  std::vector<size_t> spike_dims;
  PsoReport pso;
  bool pso_success = false;

  bool ok() const { return error.empty(); }
};

struct Proportion {
  size_t hits = 0;
  size_t total = 0;
  double rate = 0;
  double lo = 0;
  double hi = 0;
};

// Wilson score interval at 95%.
Proportion WilsonInterval(size_t hits, size_t total);

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialRecord> trials;

  Proportion daleth;
  Proportion collision_free;
  Proportion collision_free_success;
  Proportion valid;
  double mean_downcoded = 0;
  size_t errors = 0;

  size_t predicates = 0;
  Proportion isolation;
  Proportion pairwise_disjoint;
  Proportion pso_success;
  std::map<size_t, size_t> psi_histogram;
  size_t mc_checks = 0;
  uint64_t mc_hits = 0;
  double mc_max_abs_error = 0;

  // Structural diagnostics.
  double claim2_conformity = 1.0;
  size_t claim1_max_nonconfined = 0;
  Proportion claim3;
};

struct RunOptions {
  size_t workers = 1;
};

absl::StatusOr<ExperimentReport> RunDowncodingExperiment(
    const ExperimentConfig& config, const RunOptions& options = {});
absl::StatusOr<ExperimentReport> RunPsoExperiment(
    const ExperimentConfig& config, const RunOptions& options = {});
// Dispatches on the configured theorem.
absl::StatusOr<ExperimentReport> RunExperiment(const ExperimentConfig& config,
                                               const RunOptions& options = {});

struct GateResult {
  std::string name;
  double value = 0;
  double threshold = 0;
  bool pass = false;
};

std::vector<GateResult> EvaluateGates(const ExperimentReport& report);

// Deterministic JSON rendering.
std::string ReportToJson(const ExperimentReport& report);

}  // namespace downcode

#endif  // DOWNCODE_EXPERIMENT_H_
