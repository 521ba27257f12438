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

#ifndef DOWNCODE_MINIMALITY_H_
#define DOWNCODE_MINIMALITY_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "downcode/dataset.h"

namespace downcode {

struct MinimalitySearchOptions {
  // Upper bound on the product of per-row candidate counts.
  uint64_t max_candidates = 10'000'000;
};

// Cells that are subsets of `cell` and contain `v`, coarsest first: the
// hierarchy chain below `cell` followed by the exact value.
std::vector<Cell> RefinementChain(const Hierarchy& h, Cell cell, Scalar v);

// Size of the exhaustive search space for strict refinements of `y`.
uint64_t RefinementSearchSpace(const Dataset& x, const GeneralizedDataset& y);

// A k-anonymous, correct dataset strictly refining `y`, if any exists.
// Fails with kResourceExhausted when the search space exceeds the guard.
absl::StatusOr<std::optional<GeneralizedDataset>> FindStrictRefinement(
    const Dataset& x, const GeneralizedDataset& y, size_t k,
    const MinimalitySearchOptions& options = {});

// No strict refinement of `y` keeps the k-anonymity/hierarchy/correctness
// triple.
absl::StatusOr<bool> BruteForceIsMinimal(
    const Dataset& x, const GeneralizedDataset& y, size_t k,
    const MinimalitySearchOptions& options = {});

}  // namespace downcode

#endif  // DOWNCODE_MINIMALITY_H_
