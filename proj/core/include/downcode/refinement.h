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

#ifndef DOWNCODE_REFINEMENT_H_
#define DOWNCODE_REFINEMENT_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "downcode/dataset.h"
#include "downcode/hierarchy.h"

namespace downcode {

enum class Relation { kEqual, kStrict, kIncomparable };

struct RecordRefinement {
  Relation relation = Relation::kIncomparable;
  // Dimensions with proper containment; only filled for kStrict.
  std::vector<size_t> refined_dims;
};

// Whether `z` refines `y` cell by cell.
absl::StatusOr<RecordRefinement> Refines(
    const std::vector<HierarchyPtr>& hierarchies, std::span<const Cell> z,
    std::span<const Cell> y);

struct DatasetRefinementReport {
  bool holds = false;
  size_t delta_n = 0;
  // Smallest refined-dimension count among strictly refined rows.
  size_t min_delta_d = 0;
};

absl::StatusOr<DatasetRefinementReport> DatasetRefines(
    const GeneralizedDataset& z, const GeneralizedDataset& y);

// x_n lies in z_n for every row n.
absl::StatusOr<bool> GeneralizesDataset(const GeneralizedDataset& z,
                                        const Dataset& x);

// Like GeneralizesDataset, but within each equivalence class of `classes`
// the rows of `z` may be matched to the rows of `x` in any order.
absl::StatusOr<bool> GeneralizesWithinClasses(
    const GeneralizedDataset& z, const Dataset& x,
    const GeneralizedDataset& classes);

// Rows grouped by identical projection onto `q`, ordered by first member.
std::vector<std::vector<size_t>> EquivalenceClasses(
    const GeneralizedDataset& y, const QuasiIdentifier& q);

absl::StatusOr<size_t> EffectiveAnonymity(const GeneralizedDataset& y,
                                          size_t n, const QuasiIdentifier& q);

// Effective anonymity of every row.
std::vector<size_t> EffectiveAnonymities(const GeneralizedDataset& y,
                                         const QuasiIdentifier& q);

absl::StatusOr<bool> IsKAnonymous(const GeneralizedDataset& y, size_t k,
                                  const QuasiIdentifier& q);

// Finest cell containing all `values`.
absl::StatusOr<Cell> LeastCommonNode(const Hierarchy& h,
                                     std::span<const Scalar> values);

}  // namespace downcode

#endif  // DOWNCODE_REFINEMENT_H_
