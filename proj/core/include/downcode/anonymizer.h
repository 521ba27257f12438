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

#ifndef DOWNCODE_ANONYMIZER_H_
#define DOWNCODE_ANONYMIZER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "downcode/dataset.h"
#include "downcode/hierarchy.h"

namespace downcode {

enum class Strategy { kTop, kLcaPartition, kRandomPartition };

// Accepts "top", "lca" and "random" (and the long "-partition" forms).
absl::StatusOr<Strategy> ParseStrategy(std::string_view name);
std::string_view StrategyName(Strategy strategy);

struct AnonymizerConfig {
  size_t k = 2;
  Strategy strategy = Strategy::kTop;
  uint64_t seed = 0;
};

// One local refinement step taken by the minimizer.
struct RefinementMove {
  enum class Kind { kAdoptSingle, kGroupSplit, kClassDescent, kClassMerge };

  Kind kind = Kind::kAdoptSingle;
  GeneralizedRecord from;
  // Destination record; for kClassMerge the rows may land in several.
  GeneralizedRecord to;
  std::vector<size_t> rows;
  std::optional<size_t> dim;
};

// Ok iff `y` is k-anonymous over all dimensions, every cell is valid for its
// hierarchy, and y generalizes x row by row.
absl::Status CheckTriple(const Dataset& x, const GeneralizedDataset& y,
                         size_t k);

// A k-anonymous starting point: all-root, or blocks of at least k rows
// generalized to their per-dimension least common node.
absl::StatusOr<GeneralizedDataset> InitialAnonymize(
    const Dataset& x, std::vector<HierarchyPtr> hierarchies,
    const AnonymizerConfig& config);

// Row n adopts the first existing strictly finer record that still contains
// x_n, provided its class has more than k rows.
absl::StatusOr<GeneralizedDataset> SingleFlush(const Dataset& x,
                                               const GeneralizedDataset& y,
                                               size_t k, size_t n);

// Splits at least k rows of n's class one level down on the first dimension
// and child where both parts stay k-anonymous.
absl::StatusOr<GeneralizedDataset> GroupFlush(const Dataset& x,
                                              const GeneralizedDataset& y,
                                              size_t k, size_t n);

// Vacates the class at `class_record` entirely, with k phantom rows lending
// support while its rows move. Returns y unchanged if the class cannot be
// emptied.
absl::StatusOr<GeneralizedDataset> SimulFlush(
    const Dataset& x, const GeneralizedDataset& y, size_t k,
    std::span<const Cell> class_record);

// Applies the three flush moves until none changes the dataset.
absl::StatusOr<GeneralizedDataset> Minimize(
    const Dataset& x, const GeneralizedDataset& y, size_t k,
    std::vector<RefinementMove>* trace = nullptr);

// InitialAnonymize followed by Minimize.
absl::StatusOr<GeneralizedDataset> Anonymize(
    const Dataset& x, std::vector<HierarchyPtr> hierarchies,
    const AnonymizerConfig& config);

}  // namespace downcode

#endif  // DOWNCODE_ANONYMIZER_H_
