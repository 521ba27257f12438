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

#include "downcode/refinement.h"

#include <algorithm>
#include <functional>

#include "absl/container/flat_hash_map.h"
#include "absl/strings/str_cat.h"
#include "string_compat.h"

namespace downcode {
namespace {

absl::Status ShapeError(std::string_view what, size_t a, size_t b) {
  return absl::InvalidArgumentError(
      absl::StrCat(internal::Sv(what), " mismatch: ", a, " vs ", b));
}

absl::Status CheckShape(const GeneralizedDataset& z, const Dataset& x) {
  if (z.size() != x.size()) return ShapeError("row count", z.size(), x.size());
  if (z.size() > 0 && z.dims() != x.dims()) {
    return ShapeError("dimension", z.dims(), x.dims());
  }
  return absl::OkStatus();
}

bool RowFits(const GeneralizedDataset& z, size_t zn, const Dataset& x,
             size_t xn) {
  for (size_t d = 0; d < z.dims(); ++d) {
    if (!z.hierarchy(d).Contains(z.at(zn, d), x.at(xn, d))) return false;
  }
  return true;
}

GeneralizedRecord Project(const GeneralizedDataset& y, size_t n,
                          const QuasiIdentifier& q) {
  GeneralizedRecord key;
  key.reserve(q.dims.size());
  for (size_t d : q.dims) key.push_back(y.at(n, d));
  return key;
}

}  // namespace

absl::StatusOr<RecordRefinement> Refines(
    const std::vector<HierarchyPtr>& hierarchies, std::span<const Cell> z,
    std::span<const Cell> y) {
  if (z.size() != y.size() || z.size() != hierarchies.size()) {
    return ShapeError("dimension", z.size(), y.size());
  }
  RecordRefinement out;
  for (size_t d = 0; d < z.size(); ++d) {
    const Hierarchy& h = *hierarchies[d];
    const Cell a = h.Canonical(z[d]);
    const Cell b = h.Canonical(y[d]);
    if (a == b) continue;
    if (!h.IsSubset(a, b)) {
      out.refined_dims.clear();
      return out;
    }
    out.refined_dims.push_back(d);
  }
  out.relation =
      out.refined_dims.empty() ? Relation::kEqual : Relation::kStrict;
  return out;
}

absl::StatusOr<DatasetRefinementReport> DatasetRefines(
    const GeneralizedDataset& z, const GeneralizedDataset& y) {
  if (z.size() != y.size()) return ShapeError("row count", z.size(), y.size());
  if (z.dims() != y.dims()) return ShapeError("dimension", z.dims(), y.dims());
  DatasetRefinementReport report;
  report.holds = true;
  size_t min_d = 0;
  for (size_t n = 0; n < z.size(); ++n) {
    absl::StatusOr<RecordRefinement> r =
        Refines(y.hierarchies(), z.row(n), y.row(n));
    if (!r.ok()) return r.status();
    if (r->relation == Relation::kIncomparable) {
      report.holds = false;
      continue;
    }
    if (r->relation == Relation::kStrict) {
      ++report.delta_n;
      min_d = report.delta_n == 1 ? r->refined_dims.size()
                                  : std::min(min_d, r->refined_dims.size());
    }
  }
  report.min_delta_d = min_d;
  return report;
}

absl::StatusOr<bool> GeneralizesDataset(const GeneralizedDataset& z,
                                        const Dataset& x) {
  if (absl::Status s = CheckShape(z, x); !s.ok()) return s;
  for (size_t n = 0; n < z.size(); ++n) {
    if (!RowFits(z, n, x, n)) return false;
  }
  return true;
}

absl::StatusOr<bool> GeneralizesWithinClasses(
    const GeneralizedDataset& z, const Dataset& x,
    const GeneralizedDataset& classes) {
  if (absl::Status s = CheckShape(z, x); !s.ok()) return s;
  if (classes.size() != z.size()) {
    return ShapeError("row count", classes.size(), z.size());
  }
  for (const std::vector<size_t>& rows :
       EquivalenceClasses(classes, QuasiIdentifier::All(classes.dims()))) {
    // Kuhn's augmenting paths: z rows on the left, x rows on the right.
    const size_t m = rows.size();
    std::vector<std::vector<size_t>> fits(m);
    for (size_t i = 0; i < m; ++i) {
      for (size_t j = 0; j < m; ++j) {
        if (RowFits(z, rows[i], x, rows[j])) fits[i].push_back(j);
      }
      if (fits[i].empty()) return false;
    }
    std::vector<int> match(m, -1);
    std::vector<bool> seen;
    std::function<bool(size_t)> augment = [&](size_t i) {
      for (size_t j : fits[i]) {
        if (seen[j]) continue;
        seen[j] = true;
        if (match[j] < 0 || augment(match[j])) {
          match[j] = static_cast<int>(i);
          return true;
        }
      }
      return false;
    };
    for (size_t i = 0; i < m; ++i) {
      seen.assign(m, false);
      if (!augment(i)) return false;
    }
  }
  return true;
}

std::vector<std::vector<size_t>> EquivalenceClasses(
    const GeneralizedDataset& y, const QuasiIdentifier& q) {
  absl::flat_hash_map<GeneralizedRecord, size_t> index;
  std::vector<std::vector<size_t>> classes;
  for (size_t n = 0; n < y.size(); ++n) {
    auto [it, inserted] = index.emplace(Project(y, n, q), classes.size());
    if (inserted) classes.emplace_back();
    classes[it->second].push_back(n);
  }
  return classes;
}

absl::StatusOr<size_t> EffectiveAnonymity(const GeneralizedDataset& y,
                                          size_t n, const QuasiIdentifier& q) {
  if (n >= y.size()) {
    return absl::OutOfRangeError(
        absl::StrCat("row ", n, " out of range for ", y.size(), " rows"));
  }
  if (absl::Status s = q.Validate(y.dims()); !s.ok()) return s;
  const GeneralizedRecord key = Project(y, n, q);
  size_t count = 0;
  for (size_t m = 0; m < y.size(); ++m) {
    if (Project(y, m, q) == key) ++count;
  }
  return count;
}

std::vector<size_t> EffectiveAnonymities(const GeneralizedDataset& y,
                                         const QuasiIdentifier& q) {
  std::vector<size_t> ea(y.size(), 0);
  for (const std::vector<size_t>& rows : EquivalenceClasses(y, q)) {
    for (size_t n : rows) ea[n] = rows.size();
  }
  return ea;
}

absl::StatusOr<bool> IsKAnonymous(const GeneralizedDataset& y, size_t k,
                                  const QuasiIdentifier& q) {
  if (k < 2) {
    return absl::InvalidArgumentError(absl::StrCat("k must be >= 2, got ", k));
  }
  if (y.size() == 0) return true;
  if (absl::Status s = q.Validate(y.dims()); !s.ok()) return s;
  for (size_t ea : EffectiveAnonymities(y, q)) {
    if (ea < k) return false;
  }
  return true;
}

absl::StatusOr<Cell> LeastCommonNode(const Hierarchy& h,
                                     std::span<const Scalar> values) {
  if (values.empty()) {
    return absl::InvalidArgumentError("least common node of no values");
  }
  std::optional<NodeIndex> node;
  bool all_equal = true;
  for (Scalar v : values) {
    absl::StatusOr<NodeIndex> at = h.Locate(v);
    if (!at.ok()) return at.status();
    all_equal = all_equal && v == values.front();
    node = node.has_value() ? h.Lca(*node, *at) : *at;
  }
  if (all_equal) return Cell::Exact(values.front());
  return h.Canonical(Cell::Node(*node));
}

}  // namespace downcode
