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

#include "downcode/audit.h"

#include <algorithm>
#include <map>
#include <utility>

#include "absl/container/flat_hash_map.h"
#include "absl/strings/str_cat.h"

namespace downcode {
namespace {

constexpr size_t kFullModeLimit = 20;
constexpr size_t kAutoFullLimit = 12;

absl::Status CheckQi(const AuditDataset& y, const QuasiIdentifier& q) {
  return q.Validate(y.columns());
}

absl::Status CheckRow(const AuditDataset& y, size_t n) {
  if (n >= y.size()) {
    return absl::OutOfRangeError(
        absl::StrCat("row ", n, " out of range for ", y.size(), " rows"));
  }
  return absl::OkStatus();
}

// Rows grouped by identical projection onto q, ordered by first member.
std::vector<std::vector<size_t>> Groups(const AuditDataset& y,
                                        const QuasiIdentifier& q) {
  std::vector<std::vector<size_t>> groups;
  absl::flat_hash_map<std::vector<int64_t>, size_t> index;
  std::vector<int64_t> key(q.dims.size());
  for (size_t n = 0; n < y.size(); ++n) {
    for (size_t i = 0; i < q.dims.size(); ++i) key[i] = y.CellKey(n, q.dims[i]);
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(n);
  }
  return groups;
}

bool AllIntersect(const AuditDataset& y, size_t n, size_t m,
                  const std::vector<size_t>& dims) {
  for (size_t c : dims) {
    if (!y.CellsIntersect(n, m, c)) return false;
  }
  return true;
}

}  // namespace

absl::StatusOr<AuditDataset> AuditDataset::Create(
    std::vector<std::string> columns, std::vector<std::vector<AuditCell>> rows,
    const std::vector<std::vector<std::string>>& extra_domain) {
  AuditDataset y;
  y.names_ = std::move(columns);
  for (size_t n = 0; n < rows.size(); ++n) {
    if (rows[n].size() != y.names_.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("audit row ", n, " has ", rows[n].size(),
                       " cells, expected ", y.names_.size()));
    }
    for (const AuditCell& cell : rows[n]) {
      if (cell.kind == AuditCell::Kind::kSet && cell.set.empty()) {
        return absl::InvalidArgumentError(
            absl::StrCat("audit row ", n, " has an empty set cell"));
      }
    }
  }
  if (!extra_domain.empty() && extra_domain.size() != y.names_.size()) {
    return absl::InvalidArgumentError(
        "declared domain extras must list every column");
  }
  y.rows_ = std::move(rows);

  y.compiled_.resize(y.names_.size());
  for (size_t c = 0; c < y.names_.size(); ++c) {
    Column& col = y.compiled_[c];
    std::vector<std::string>& domain = col.domain;
    for (const std::vector<AuditCell>& row : y.rows_) {
      const AuditCell& cell = row[c];
      if (cell.kind == AuditCell::Kind::kValue) domain.push_back(cell.value);
      if (cell.kind == AuditCell::Kind::kSet) {
        domain.insert(domain.end(), cell.set.begin(), cell.set.end());
      }
    }
    if (!extra_domain.empty()) {
      domain.insert(domain.end(), extra_domain[c].begin(),
                    extra_domain[c].end());
    }
    std::sort(domain.begin(), domain.end());
    domain.erase(std::unique(domain.begin(), domain.end()), domain.end());

    auto id_of = [&domain](const std::string& v) {
      return static_cast<size_t>(
          std::lower_bound(domain.begin(), domain.end(), v) - domain.begin());
    };
    const size_t words = (domain.size() + 63) / 64;
    std::map<std::vector<size_t>, int64_t> set_ids;
    for (const std::vector<AuditCell>& row : y.rows_) {
      const AuditCell& cell = row[c];
      std::vector<uint64_t> mask(words, 0);
      int64_t key = -1;
      switch (cell.kind) {
        case AuditCell::Kind::kValue: {
          const size_t id = id_of(cell.value);
          mask[id / 64] |= uint64_t{1} << (id % 64);
          key = static_cast<int64_t>(id);
          break;
        }
        case AuditCell::Kind::kMissing:
          for (size_t id = 0; id < domain.size(); ++id) {
            mask[id / 64] |= uint64_t{1} << (id % 64);
          }
          break;
        case AuditCell::Kind::kSet: {
          std::vector<size_t> ids;
          for (const std::string& v : cell.set) ids.push_back(id_of(v));
          std::sort(ids.begin(), ids.end());
          ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
          for (size_t id : ids) mask[id / 64] |= uint64_t{1} << (id % 64);
          if (ids.size() == 1) {
            key = static_cast<int64_t>(ids.front());
          } else {
            auto [it, inserted] = set_ids.emplace(
                ids, -2 - static_cast<int64_t>(set_ids.size()));
            key = it->second;
          }
          break;
        }
      }
      col.key.push_back(key);
      col.mask.push_back(std::move(mask));
    }
  }
  return y;
}

std::optional<size_t> AuditDataset::ColumnIndex(std::string_view name) const {
  for (size_t c = 0; c < names_.size(); ++c) {
    if (names_[c] == name) return c;
  }
  return std::nullopt;
}

bool AuditDataset::CellsIntersect(size_t n, size_t m, size_t c) const {
  if (compiled_[c].key[n] == -1 && compiled_[c].key[m] == -1) return true;
  const std::vector<uint64_t>& a = compiled_[c].mask[n];
  const std::vector<uint64_t>& b = compiled_[c].mask[m];
  for (size_t w = 0; w < a.size(); ++w) {
    if ((a[w] & b[w]) != 0) return true;
  }
  return false;
}

absl::StatusOr<size_t> AuditEffectiveAnonymity(const AuditDataset& y,
                                               size_t n,
                                               const QuasiIdentifier& q) {
  if (absl::Status s = CheckRow(y, n); !s.ok()) return s;
  if (absl::Status s = CheckQi(y, q); !s.ok()) return s;
  size_t count = 0;
  for (size_t m = 0; m < y.size(); ++m) {
    bool same = true;
    for (size_t c : q.dims) same = same && y.CellsEqual(n, m, c);
    if (same) ++count;
  }
  return count;
}

absl::StatusOr<size_t> AmbiguousEffectiveAnonymity(const AuditDataset& y,
                                                   size_t n,
                                                   const QuasiIdentifier& q) {
  if (absl::Status s = CheckRow(y, n); !s.ok()) return s;
  if (absl::Status s = CheckQi(y, q); !s.ok()) return s;
  size_t count = 0;
  for (size_t m = 0; m < y.size(); ++m) {
    if (AllIntersect(y, n, m, q.dims)) ++count;
  }
  return count;
}

absl::StatusOr<std::vector<size_t>> AuditEffectiveAnonymities(
    const AuditDataset& y, const QuasiIdentifier& q) {
  if (absl::Status s = CheckQi(y, q); !s.ok()) return s;
  std::vector<size_t> ea(y.size(), 0);
  for (const std::vector<size_t>& g : Groups(y, q)) {
    for (size_t n : g) ea[n] = g.size();
  }
  return ea;
}

absl::StatusOr<std::vector<size_t>> AmbiguousEffectiveAnonymities(
    const AuditDataset& y, const QuasiIdentifier& q) {
  if (absl::Status s = CheckQi(y, q); !s.ok()) return s;
  const std::vector<std::vector<size_t>> groups = Groups(y, q);
  std::vector<size_t> per_group(groups.size(), 0);
  for (size_t a = 0; a < groups.size(); ++a) {
    per_group[a] += groups[a].size();
    for (size_t b = a + 1; b < groups.size(); ++b) {
      if (AllIntersect(y, groups[a].front(), groups[b].front(), q.dims)) {
        per_group[a] += groups[b].size();
        per_group[b] += groups[a].size();
      }
    }
  }
  std::vector<size_t> amb(y.size(), 0);
  for (size_t g = 0; g < groups.size(); ++g) {
    for (size_t n : groups[g]) amb[n] = per_group[g];
  }
  return amb;
}

absl::StatusOr<AuditTable> Audit(const AuditDataset& y,
                                 const std::vector<QuasiIdentifier>& qis,
                                 size_t k) {
  if (k < 2) {
    return absl::InvalidArgumentError(absl::StrCat("k must be >= 2, got ", k));
  }
  std::vector<QuasiIdentifier> all = qis;
  if (qis.size() > 1) {
    QuasiIdentifier joint;
    joint.name = "union";
    for (const QuasiIdentifier& q : qis) {
      joint.dims.insert(joint.dims.end(), q.dims.begin(), q.dims.end());
    }
    std::sort(joint.dims.begin(), joint.dims.end());
    joint.dims.erase(std::unique(joint.dims.begin(), joint.dims.end()),
                     joint.dims.end());
    all.push_back(std::move(joint));
  }
  AuditTable table;
  table.k = k;
  table.rows = y.size();
  for (const QuasiIdentifier& q : all) {
    absl::StatusOr<std::vector<size_t>> ea = AuditEffectiveAnonymities(y, q);
    if (!ea.ok()) return ea.status();
    absl::StatusOr<std::vector<size_t>> amb =
        AmbiguousEffectiveAnonymities(y, q);
    if (!amb.ok()) return amb.status();
    QiCounts counts;
    counts.name = q.name;
    counts.dims = q.dims;
    for (size_t n = 0; n < y.size(); ++n) {
      counts.ea_unique += (*ea)[n] == 1;
      counts.ea_below_k += (*ea)[n] < k;
      counts.amb_unique += (*amb)[n] == 1;
      counts.amb_below_k += (*amb)[n] < k;
    }
    table.qis.push_back(std::move(counts));
  }
  return table;
}

absl::StatusOr<std::vector<RedactionEntry>> RedactionSensitivity(
    const AuditDataset& y, size_t n, const QuasiIdentifier& q, size_t k,
    RedactionMode mode) {
  if (absl::Status s = CheckRow(y, n); !s.ok()) return s;
  if (absl::Status s = CheckQi(y, q); !s.ok()) return s;
  const size_t width = q.dims.size();
  if (mode == RedactionMode::kAuto) {
    mode = width <= kAutoFullLimit ? RedactionMode::kFull
                                   : RedactionMode::kLeaveOneOut;
  }
  if (mode == RedactionMode::kFull && width > kFullModeLimit) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "full redaction enumeration over ", width, " columns exceeds ",
        kFullModeLimit));
  }
  std::vector<std::vector<size_t>> subsets;
  if (mode == RedactionMode::kFull) {
    for (uint64_t bits = 0; bits < (uint64_t{1} << width); ++bits) {
      std::vector<size_t> dims;
      for (size_t i = 0; i < width; ++i) {
        if (bits >> i & 1) dims.push_back(q.dims[i]);
      }
      subsets.push_back(std::move(dims));
    }
  } else {
    for (size_t skip = 0; skip < width; ++skip) {
      std::vector<size_t> dims;
      for (size_t i = 0; i < width; ++i) {
        if (i != skip) dims.push_back(q.dims[i]);
      }
      subsets.push_back(std::move(dims));
    }
  }
  std::vector<RedactionEntry> out;
  for (std::vector<size_t>& dims : subsets) {
    RedactionEntry entry;
    for (size_t m = 0; m < y.size(); ++m) {
      if (AllIntersect(y, n, m, dims)) ++entry.ea_amb;
    }
    entry.unique = entry.ea_amb == 1;
    entry.below_k = entry.ea_amb < k;
    entry.dims = std::move(dims);
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace downcode
