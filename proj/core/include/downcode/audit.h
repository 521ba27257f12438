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

#ifndef DOWNCODE_AUDIT_H_
#define DOWNCODE_AUDIT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "downcode/dataset.h"

namespace downcode {

// A raw audit cell: a categorical value, a missing value, or a generalized
// value standing for a set of categories.
struct AuditCell {
  enum class Kind { kValue, kMissing, kSet };

  Kind kind = Kind::kMissing;
  std::string value;
  std::vector<std::string> set;

  static AuditCell Value(std::string v) {
    return {Kind::kValue, std::move(v), {}};
  }
  static AuditCell Missing() { return {Kind::kMissing, {}, {}}; }
  static AuditCell Set(std::vector<std::string> members) {
    return {Kind::kSet, {}, std::move(members)};
  }
};

// Immutable table of audit cells. A missing cell matches every value of its
// column domain: the observed values plus any declared extras.
class AuditDataset {
 public:
  static absl::StatusOr<AuditDataset> Create(
      std::vector<std::string> columns,
      std::vector<std::vector<AuditCell>> rows,
      const std::vector<std::vector<std::string>>& extra_domain = {});

  size_t size() const { return rows_.size(); }
  size_t columns() const { return names_.size(); }
  const std::string& column_name(size_t c) const { return names_[c]; }
  std::optional<size_t> ColumnIndex(std::string_view name) const;
  const AuditCell& at(size_t n, size_t c) const { return rows_[n][c]; }
  // Sorted distinct values a missing cell in column c stands for.
  const std::vector<std::string>& domain(size_t c) const {
    return compiled_[c].domain;
  }

  // Cells of rows n and m share at least one value in column c.
  bool CellsIntersect(size_t n, size_t m, size_t c) const;
  // Cells of rows n and m are the same representation in column c.
  bool CellsEqual(size_t n, size_t m, size_t c) const {
    return compiled_[c].key[n] == compiled_[c].key[m];
  }
  // Identifier of the cell's representation, shared by equal cells.
  int64_t CellKey(size_t n, size_t c) const { return compiled_[c].key[n]; }

 private:
  struct Column {
    std::vector<std::string> domain;
    // Representation id per row: value index, -1 for missing, or a set id
    // below -1.
    std::vector<int64_t> key;
    // Membership bitmask over `domain` per row.
    std::vector<std::vector<uint64_t>> mask;
  };

  std::vector<std::string> names_;
  std::vector<std::vector<AuditCell>> rows_;
  std::vector<Column> compiled_;
};

absl::StatusOr<size_t> AuditEffectiveAnonymity(const AuditDataset& y,
                                               size_t n,
                                               const QuasiIdentifier& q);
absl::StatusOr<size_t> AmbiguousEffectiveAnonymity(const AuditDataset& y,
                                                   size_t n,
                                                   const QuasiIdentifier& q);

// Per-row counts for every row at once.
absl::StatusOr<std::vector<size_t>> AuditEffectiveAnonymities(
    const AuditDataset& y, const QuasiIdentifier& q);
absl::StatusOr<std::vector<size_t>> AmbiguousEffectiveAnonymities(
    const AuditDataset& y, const QuasiIdentifier& q);

struct QiCounts {
  std::string name;
  std::vector<size_t> dims;
  size_t ea_unique = 0;
  size_t ea_below_k = 0;
  size_t amb_unique = 0;
  size_t amb_below_k = 0;
};

struct AuditTable {
  size_t k = 0;
  size_t rows = 0;
  std::vector<QiCounts> qis;
  // Optional denominator for percentage columns.
  std::optional<size_t> denominator;
};

// One row of counts per quasi-identifier, plus a final row for the union of
// all of them when more than one is given.
absl::StatusOr<AuditTable> Audit(const AuditDataset& y,
                                 const std::vector<QuasiIdentifier>& qis,
                                 size_t k);

enum class RedactionMode { kAuto, kFull, kLeaveOneOut };

struct RedactionEntry {
  std::vector<size_t> dims;
  size_t ea_amb = 0;
  bool unique = false;
  bool below_k = false;
};

// Whether row n stays unambiguously unique when parts of q are withheld:
// every subset of q (full), or q minus one column (leave-one-out). Auto
// picks full up to 12 columns.
absl::StatusOr<std::vector<RedactionEntry>> RedactionSensitivity(
    const AuditDataset& y, size_t n, const QuasiIdentifier& q, size_t k,
    RedactionMode mode = RedactionMode::kAuto);

}  // namespace downcode

#endif  // DOWNCODE_AUDIT_H_
