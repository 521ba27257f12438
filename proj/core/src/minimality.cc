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

#include "downcode/minimality.h"

#include <algorithm>
#include <limits>
#include <utility>

#include "absl/container/flat_hash_map.h"
#include "absl/strings/str_cat.h"
#include "downcode/anonymizer.h"

namespace downcode {
namespace {

uint64_t SaturatingMul(uint64_t a, uint64_t b) {
  if (a != 0 && b > std::numeric_limits<uint64_t>::max() / a) {
    return std::numeric_limits<uint64_t>::max();
  }
  return a * b;
}

class RefinementSearch {
 public:
  RefinementSearch(const Dataset& x, const GeneralizedDataset& y, size_t k)
      : x_(x), y_(y), k_(k), candidates_(y.size()), assigned_(y.size()) {
    for (size_t n = 0; n < y.size(); ++n) {
      std::vector<GeneralizedRecord> records = {{}};
      for (size_t d = 0; d < y.dims(); ++d) {
        std::vector<GeneralizedRecord> next;
        for (const Cell& c :
             RefinementChain(y.hierarchy(d), y.at(n, d), x.at(n, d))) {
          for (const GeneralizedRecord& prefix : records) {
            next.push_back(prefix);
            next.back().push_back(c);
          }
        }
        records = std::move(next);
      }
      candidates_[n] = std::move(records);
    }
  }

  std::optional<GeneralizedDataset> Run() {
    if (!Search(0, false)) return std::nullopt;
    GeneralizedDataset z = y_;
    for (size_t n = 0; n < z.size(); ++n) z.SetRow(n, assigned_[n]);
    return z;
  }

 private:
  bool Fits(size_t m, const GeneralizedRecord& r) const {
    for (size_t d = 0; d < y_.dims(); ++d) {
      const Hierarchy& h = y_.hierarchy(d);
      if (!h.Contains(r[d], x_.at(m, d)) || !h.IsSubset(r[d], y_.at(m, d))) {
        return false;
      }
    }
    return true;
  }

  // Rows next..N-1 can still lift every undersized class to k.
  bool Feasible(size_t next) const {
    const size_t remaining = y_.size() - next;
    size_t deficit = 0;
    for (const auto& [record, count] : counts_) {
      if (count == 0 || count >= k_) continue;
      const size_t need = k_ - count;
      deficit += need;
      if (deficit > remaining) return false;
      size_t able = 0;
      for (size_t m = next; m < y_.size() && able < need; ++m) {
        if (Fits(m, record)) ++able;
      }
      if (able < need) return false;
    }
    return true;
  }

  bool Search(size_t n, bool strict) {
    if (n == y_.size()) return strict;
    for (const GeneralizedRecord& r : candidates_[n]) {
      assigned_[n] = r;
      ++counts_[r];
      const bool now_strict =
          strict || !std::equal(r.begin(), r.end(), y_.row(n).begin());
      if (Feasible(n + 1) && Search(n + 1, now_strict)) return true;
      --counts_[r];
    }
    return false;
  }

  const Dataset& x_;
  const GeneralizedDataset& y_;
  size_t k_;
  std::vector<std::vector<GeneralizedRecord>> candidates_;
  std::vector<GeneralizedRecord> assigned_;
  absl::flat_hash_map<GeneralizedRecord, size_t> counts_;
};

}  // namespace

std::vector<Cell> RefinementChain(const Hierarchy& h, Cell cell, Scalar v) {
  cell = h.Canonical(cell);
  if (cell.is_exact()) return {cell};
  std::vector<Cell> chain;
  absl::StatusOr<NodeIndex> deepest = h.Locate(v);
  if (deepest.ok() && h.IsAncestorOrSelf(cell.node(), *deepest)) {
    for (NodeIndex n = *deepest;; n = *h.parent(n)) {
      const Cell c = h.Canonical(Cell::Node(n));
      if (chain.empty() || !(chain.back() == c)) chain.push_back(c);
      if (n == cell.node()) break;
    }
    std::reverse(chain.begin(), chain.end());
  } else {
    chain.push_back(cell);
  }
  if (!chain.back().is_exact()) chain.push_back(Cell::Exact(v));
  return chain;
}

uint64_t RefinementSearchSpace(const Dataset& x, const GeneralizedDataset& y) {
  uint64_t total = 1;
  for (size_t n = 0; n < y.size(); ++n) {
    for (size_t d = 0; d < y.dims(); ++d) {
      total = SaturatingMul(
          total, RefinementChain(y.hierarchy(d), y.at(n, d), x.at(n, d)).size());
    }
  }
  return total;
}

absl::StatusOr<std::optional<GeneralizedDataset>> FindStrictRefinement(
    const Dataset& x, const GeneralizedDataset& y, size_t k,
    const MinimalitySearchOptions& options) {
  if (absl::Status s = CheckTriple(x, y, k); !s.ok()) return s;
  const uint64_t space = RefinementSearchSpace(x, y);
  if (space > options.max_candidates) {
    return absl::ResourceExhaustedError(
        absl::StrCat("refinement search space ", space, " exceeds the guard ",
                     options.max_candidates));
  }
  return RefinementSearch(x, y, k).Run();
}

absl::StatusOr<bool> BruteForceIsMinimal(
    const Dataset& x, const GeneralizedDataset& y, size_t k,
    const MinimalitySearchOptions& options) {
  absl::StatusOr<std::optional<GeneralizedDataset>> witness =
      FindStrictRefinement(x, y, k, options);
  if (!witness.ok()) return witness.status();
  return !witness->has_value();
}

}  // namespace downcode
