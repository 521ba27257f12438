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

#ifndef DOWNCODE_ATTACKS_H_
#define DOWNCODE_ATTACKS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "downcode/dataset.h"
#include "downcode/generators.h"

namespace downcode {

// Adversaries see only the published dataset, k and distribution parameters.

enum class ClusterAction {
  kDowncoded,
  kPassthroughSize,
  kPassthroughBalance,
  kSkippedNonConforming,
  kSkippedNoRow,
};

std::string_view ClusterActionName(ClusterAction action);

struct ClusterAudit {
  size_t t = 0;
  ClusterAction action = ClusterAction::kDowncoded;
  // Rows matched to the cluster or spike.
  size_t rows = 0;
  // b_t for clusters, |D^t| for spikes.
  size_t coarse_dims = 0;
  // Row that received the singled-out record.
  std::optional<size_t> target_row;
};

struct DowncodeOutput {
  GeneralizedDataset z;
  std::vector<size_t> changed_rows;
  std::vector<ClusterAudit> audit;

  size_t downcoded() const;
};

absl::StatusOr<DowncodeOutput> DowncodeClustered(const GeneralizedDataset& y,
                                                 size_t k,
                                                 const ClusteredParams& p);

absl::StatusOr<DowncodeOutput> DowncodePrefix(const GeneralizedDataset& y);

// The test "x lies in box" for a generalized record.
struct Predicate {
  GeneralizedRecord box;
  size_t label = 0;
  std::vector<HierarchyPtr> hierarchies;
};

// Predicates built from the singled-out rows of a downcoding.
std::vector<Predicate> PredicatesFrom(const DowncodeOutput& out);

absl::StatusOr<std::vector<Predicate>> PsoClustered(
    const GeneralizedDataset& y, size_t k, const ClusteredParams& p);
absl::StatusOr<std::vector<Predicate>> PsoPrefix(const GeneralizedDataset& y);

absl::StatusOr<bool> EvaluatePredicate(const Predicate& psi,
                                       std::span<const Scalar> x);

// Some dimension where the two boxes do not meet.
bool StructurallyDisjoint(const Predicate& a, const Predicate& b);

struct WeightEstimate {
  uint64_t hits = 0;
  uint64_t samples = 0;
};

WeightEstimate EstimatePredicateWeight(const Predicate& psi,
                                       const RecordDistribution& dist,
                                       uint64_t samples, uint64_t seed);

struct PredicateStats {
  size_t label = 0;
  size_t isolation = 0;
  double weight = 0;
  std::optional<WeightEstimate> monte_carlo;
};

struct PsoReport {
  std::vector<PredicateStats> predicates;
  bool pairwise_disjoint = true;

  size_t size() const { return predicates.size(); }
};

// Isolation counts against `x`; closed-form and sampled weights when `dist`
// is given and `mc_samples` > 0.
PsoReport PredicateSetReport(const std::vector<Predicate>& psi,
                             const Dataset& x, const RecordDistribution* dist,
                             uint64_t mc_samples, uint64_t seed);

}  // namespace downcode

#endif  // DOWNCODE_ATTACKS_H_
