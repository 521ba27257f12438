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

#include "downcode/dataset.h"

#include <algorithm>
#include <utility>

#include "absl/strings/str_cat.h"

namespace downcode {

absl::StatusOr<Dataset> Dataset::FromRows(
    const std::vector<std::vector<Scalar>>& rows) {
  if (rows.empty()) return Dataset();
  Dataset x(rows.front().size());
  for (size_t n = 0; n < rows.size(); ++n) {
    if (rows[n].size() != x.dims_) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", n, " has ", rows[n].size(), " values, expected ",
                       x.dims_));
    }
    x.AddRow(rows[n]);
  }
  return x;
}

void Dataset::AddRow(std::span<const Scalar> row) {
  values_.insert(values_.end(), row.begin(), row.end());
}

GeneralizedDataset::GeneralizedDataset(std::vector<HierarchyPtr> hierarchies,
                                       size_t rows)
    : hierarchies_(std::move(hierarchies)), rows_(rows) {
  cells_.reserve(rows_ * hierarchies_.size());
  for (size_t n = 0; n < rows_; ++n) {
    for (const HierarchyPtr& h : hierarchies_) cells_.push_back(h->RootCell());
  }
}

absl::StatusOr<GeneralizedDataset> GeneralizedDataset::Create(
    std::vector<HierarchyPtr> hierarchies,
    const std::vector<GeneralizedRecord>& rows) {
  GeneralizedDataset y(std::move(hierarchies), rows.size());
  for (size_t n = 0; n < rows.size(); ++n) {
    if (rows[n].size() != y.dims()) {
      return absl::InvalidArgumentError(
          absl::StrCat("generalized row ", n, " has ", rows[n].size(),
                       " cells, expected ", y.dims()));
    }
    for (size_t d = 0; d < y.dims(); ++d) {
      absl::Status s = y.hierarchy(d).ValidateCell(rows[n][d]);
      if (!s.ok()) {
        return absl::InvalidArgumentError(
            absl::StrCat("row ", n, " dim ", d, ": ", s.message()));
      }
      y.set(n, d, rows[n][d]);
    }
  }
  return y;
}

void GeneralizedDataset::SetRow(size_t n, std::span<const Cell> cells) {
  for (size_t d = 0; d < dims(); ++d) set(n, d, cells[d]);
}

bool GeneralizedDataset::SameSchema(const GeneralizedDataset& other) const {
  return rows_ == other.rows_ && hierarchies_ == other.hierarchies_;
}

GeneralizedDataset EmbedExact(const Dataset& x,
                              std::vector<HierarchyPtr> hierarchies) {
  GeneralizedDataset y(std::move(hierarchies), x.size());
  for (size_t n = 0; n < x.size(); ++n) {
    for (size_t d = 0; d < x.dims(); ++d) y.set(n, d, Cell::Exact(x.at(n, d)));
  }
  return y;
}

QuasiIdentifier QuasiIdentifier::All(size_t dims) {
  QuasiIdentifier q;
  q.name = "all";
  for (size_t d = 0; d < dims; ++d) q.dims.push_back(d);
  return q;
}

absl::Status QuasiIdentifier::Validate(size_t dims) const {
  if (this->dims.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("quasi-identifier '", name, "' is empty"));
  }
  for (size_t d : this->dims) {
    if (d >= dims) {
      return absl::OutOfRangeError(
          absl::StrCat("quasi-identifier '", name, "' references dimension ",
                       d, " of ", dims));
    }
  }
  return absl::OkStatus();
}

}  // namespace downcode
