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

#ifndef DOWNCODE_IO_H_
#define DOWNCODE_IO_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "downcode/attacks.h"
#include "downcode/audit.h"
#include "downcode/dataset.h"
#include "downcode/generators.h"
#include "downcode/hierarchy.h"

namespace downcode {

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, std::string_view contents);

// RFC 4180 style: comma separated, double quotes escape commas, quotes and
// newlines. Blank trailing lines are dropped.
absl::StatusOr<std::vector<std::vector<std::string>>> ParseCsv(
    std::string_view text);
std::string FormatCsvRow(const std::vector<std::string>& fields);

// Header x1..xD, one numeric row per record.
std::string DatasetToCsv(const Dataset& x);
absl::StatusOr<Dataset> DatasetFromCsv(std::string_view text);

// Header of hierarchy names; cells "v:<scalar>" or "n:<node id>".
std::string GeneralizedToCsv(const GeneralizedDataset& y);
absl::StatusOr<GeneralizedDataset> GeneralizedFromCsv(
    std::string_view text, const std::vector<HierarchyPtr>& hierarchies);

std::string CellToString(const Hierarchy& h, Cell c);
absl::StatusOr<Cell> CellFromString(const Hierarchy& h, std::string_view s);

// {"id", "domain": {...}, "nodes": [{"id", "parent", "set"}]}.
std::string HierarchyToJson(const Hierarchy& h);
absl::StatusOr<HierarchyPtr> HierarchyFromJson(std::string_view text);
// A single hierarchy shared by all `dims`, or a list with one per dimension.
absl::StatusOr<std::vector<HierarchyPtr>> HierarchiesFromJson(
    std::string_view text, size_t dims);

// Sampler description: {"kind": "clustered" | "prefix", ...}.
struct DistributionSpec {
  SampleProvenance::Kind kind = SampleProvenance::Kind::kPrefix;
  ClusteredParams clustered;
  PrefixParams prefix;
};

std::string DistributionToJson(const DistributionSpec& spec);
absl::StatusOr<DistributionSpec> DistributionFromJson(std::string_view text);

std::string ProvenanceToJson(const SampleProvenance& prov);
absl::StatusOr<SampleProvenance> ProvenanceFromJson(std::string_view text);

// [{"label", "cells": [...]}] with cells as in GeneralizedToCsv.
std::string PredicatesToJson(const std::vector<Predicate>& psi);
absl::StatusOr<std::vector<Predicate>> PredicatesFromJson(
    std::string_view text, const std::vector<HierarchyPtr>& hierarchies);

// Header row of column names. A field equal to `missing` is a missing
// value; "{a|b|c}" is a generalized set cell.
absl::StatusOr<AuditDataset> AuditDatasetFromCsv(std::string_view text,
                                                 std::string_view missing);

// Expands "a..b" ranges of columns sharing a prefix ("posts1..posts16") and
// splits on commas.
absl::StatusOr<QuasiIdentifier> ParseQiSpec(const AuditDataset& y,
                                            std::string_view spec);

std::string AuditTableToJson(const AuditTable& table,
                             const AuditDataset& y);

}  // namespace downcode

#endif  // DOWNCODE_IO_H_
