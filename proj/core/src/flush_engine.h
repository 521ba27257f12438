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

#ifndef DOWNCODE_SRC_FLUSH_ENGINE_H_
#define DOWNCODE_SRC_FLUSH_ENGINE_H_

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "downcode/anonymizer.h"
#include "downcode/dataset.h"

namespace downcode::internal {

// Mutable class table over a k-anonymous generalized dataset. Rows sharing a
// record form a class; moves relocate rows between classes and can be rolled
// back.
class FlushEngine {
 public:
  using ClassId = uint32_t;

  // `y` must already satisfy the triple for `x` and `k`.
  FlushEngine(const Dataset& x, const GeneralizedDataset& y, size_t k);

  bool SingleFlush(size_t n, std::vector<RefinementMove>* trace);
  bool GroupFlush(size_t n, std::vector<RefinementMove>* trace);
  bool SimulFlush(ClassId c, std::vector<RefinementMove>* trace);
  void Minimize(std::vector<RefinementMove>* trace);

  std::optional<ClassId> FindClass(std::span<const Cell> record) const;
  const GeneralizedDataset& result() const { return y_; }

 private:
  struct Class {
    GeneralizedRecord record;
    std::vector<size_t> rows;  // sorted
    uint64_t version = 0;
    uint64_t failed_group_version = UINT64_MAX;
  };

  ClassId Intern(GeneralizedRecord record);
  void Move(size_t n, ClassId to);
  void Rollback(size_t mark);

  // Child of `cell` that contains `v`; leaf nodes have the exact values as
  // implicit children.
  std::optional<Cell> ChildOf(size_t d, Cell cell, Scalar v) const;
  // Position of `child` among the children of `cell`, for scan order.
  double ChildRank(size_t d, Cell cell, Cell child) const;

  // First existing record, in row order, that is strictly finer than row n's
  // record and still contains x_n.
  std::optional<ClassId> AdoptTarget(size_t n) const;

  // Moves rows of class `c` one level down on one dimension. With phantoms,
  // only a move that vacates every real row counts.
  bool Split(ClassId c, size_t phantoms, std::vector<RefinementMove>* trace);

  void CheckInvariants() const;

  const Dataset& x_;
  GeneralizedDataset y_;
  size_t k_;
  std::vector<Class> classes_;
  absl::flat_hash_map<GeneralizedRecord, ClassId> index_;
  std::vector<ClassId> row_class_;
  // Nonempty classes keyed by their first row.
  std::set<std::pair<size_t, ClassId>> order_;
  std::vector<std::pair<size_t, ClassId>> log_;
  bool logging_ = false;
};

}  // namespace downcode::internal

#endif  // DOWNCODE_SRC_FLUSH_ENGINE_H_
