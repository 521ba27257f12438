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

#ifndef DOWNCODE_DATASET_H_
#define DOWNCODE_DATASET_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "downcode/hierarchy.h"
#include "downcode/value_set.h"

namespace downcode {

// N raw records of D scalars, stored row-major.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(size_t dims) : dims_(dims) {}

  static absl::StatusOr<Dataset> FromRows(
      const std::vector<std::vector<Scalar>>& rows);

  size_t size() const { return dims_ == 0 ? 0 : values_.size() / dims_; }
  size_t dims() const { return dims_; }
  bool empty() const { return values_.empty(); }

  Scalar at(size_t n, size_t d) const { return values_[n * dims_ + d]; }
  std::span<const Scalar> row(size_t n) const {
    return {values_.data() + n * dims_, dims_};
  }
  void AddRow(std::span<const Scalar> row);

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  size_t dims_ = 0;
  std::vector<Scalar> values_;
};

using GeneralizedRecord = std::vector<Cell>;

// N generalized records over per-dimension hierarchies. Cells are kept in
// canonical form.
class GeneralizedDataset {
 public:
  GeneralizedDataset() = default;
  // `rows` records, every cell at its hierarchy's root.
  GeneralizedDataset(std::vector<HierarchyPtr> hierarchies, size_t rows);

  // Validates every cell against its hierarchy.
  static absl::StatusOr<GeneralizedDataset> Create(
      std::vector<HierarchyPtr> hierarchies,
      const std::vector<GeneralizedRecord>& rows);

  size_t size() const { return rows_; }
  size_t dims() const { return hierarchies_.size(); }

  const Hierarchy& hierarchy(size_t d) const { return *hierarchies_[d]; }
  const std::vector<HierarchyPtr>& hierarchies() const { return hierarchies_; }

  Cell at(size_t n, size_t d) const { return cells_[n * dims() + d]; }
  std::span<const Cell> row(size_t n) const {
    return {cells_.data() + n * dims(), dims()};
  }
  GeneralizedRecord record(size_t n) const {
    return GeneralizedRecord(row(n).begin(), row(n).end());
  }
  void set(size_t n, size_t d, Cell c) {
    cells_[n * dims() + d] = hierarchies_[d]->Canonical(c);
  }
  void SetRow(size_t n, std::span<const Cell> cells);

  // Same shape and the same hierarchy objects per dimension.
  bool SameSchema(const GeneralizedDataset& other) const;

  friend bool operator==(const GeneralizedDataset& a,
                         const GeneralizedDataset& b) {
    return a.SameSchema(b) && a.cells_ == b.cells_;
  }

 private:
  std::vector<HierarchyPtr> hierarchies_;
  size_t rows_ = 0;
  std::vector<Cell> cells_;
};

// Raw data embedded as exact cells.
GeneralizedDataset EmbedExact(const Dataset& x,
                              std::vector<HierarchyPtr> hierarchies);

// A subset of dimensions the anonymity requirement is enforced on.
struct QuasiIdentifier {
  std::vector<size_t> dims;
  std::string name;

  static QuasiIdentifier All(size_t dims);
  absl::Status Validate(size_t dims) const;
};

}  // namespace downcode

#endif  // DOWNCODE_DATASET_H_
