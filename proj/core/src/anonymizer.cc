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

#include "downcode/anonymizer.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <utility>

#include "absl/strings/str_cat.h"
#include "downcode/refinement.h"
#include "flush_engine.h"
#include "string_compat.h"

namespace downcode {
namespace {

using internal::FlushEngine;

absl::Status CheckSchema(const Dataset& x,
                         const std::vector<HierarchyPtr>& hierarchies) {
  if (!x.empty() && x.dims() != hierarchies.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("dataset has ", x.dims(), " dimensions but ",
                     hierarchies.size(), " hierarchies were given"));
  }
  for (size_t d = 0; d < hierarchies.size(); ++d) {
    if (hierarchies[d] == nullptr) {
      return absl::InvalidArgumentError(
          absl::StrCat("missing hierarchy for dimension ", d));
    }
  }
  for (size_t n = 0; n < x.size(); ++n) {
    for (size_t d = 0; d < x.dims(); ++d) {
      if (!hierarchies[d]->domain().Contains(x.at(n, d))) {
        return absl::InvalidArgumentError(absl::StrCat(
            "row ", n, " dim ", d, " lies outside the hierarchy domain"));
      }
    }
  }
  return absl::OkStatus();
}

// Greedy blocks: the lowest unassigned row plus its k-1 nearest unassigned
// rows, where nearness sums per-dimension depths of the lowest shared node.
std::vector<std::vector<size_t>> LcaBlocks(
    const Dataset& x, const std::vector<HierarchyPtr>& hierarchies, size_t k) {
  const size_t rows = x.size();
  const size_t dims = x.dims();
  std::vector<NodeIndex> located(rows * dims);
  for (size_t n = 0; n < rows; ++n) {
    for (size_t d = 0; d < dims; ++d) {
      located[n * dims + d] = *hierarchies[d]->Locate(x.at(n, d));
    }
  }
  std::vector<size_t> unassigned(rows);
  std::iota(unassigned.begin(), unassigned.end(), 0);
  std::vector<std::vector<size_t>> blocks;
  while (!unassigned.empty()) {
    if (unassigned.size() < 2 * k) {
      blocks.push_back(unassigned);
      break;
    }
    const size_t seed = unassigned.front();
    std::vector<std::pair<long, size_t>> scored;
    for (size_t i = 1; i < unassigned.size(); ++i) {
      const size_t m = unassigned[i];
      long score = 0;
      for (size_t d = 0; d < dims; ++d) {
        const Hierarchy& h = *hierarchies[d];
        if (x.at(m, d) == x.at(seed, d)) {
          score += h.max_depth() + 1;
        } else {
          score += h.depth(h.Lca(located[seed * dims + d],
                                 located[m * dims + d]));
        }
      }
      scored.emplace_back(-score, m);
    }
    std::partial_sort(scored.begin(), scored.begin() + (k - 1), scored.end());
    std::vector<size_t> block = {seed};
    for (size_t i = 0; i + 1 < k; ++i) block.push_back(scored[i].second);
    std::sort(block.begin(), block.end());
    blocks.push_back(block);
    std::vector<size_t> rest;
    std::set_difference(unassigned.begin(), unassigned.end(), block.begin(),
                        block.end(), std::back_inserter(rest));
    unassigned = std::move(rest);
  }
  return blocks;
}

std::vector<std::vector<size_t>> RandomBlocks(size_t rows, size_t k,
                                              uint64_t seed) {
  std::vector<size_t> order(rows);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<size_t>> blocks;
  for (size_t i = 0; i + k <= rows; i += k) {
    blocks.emplace_back(order.begin() + i, order.begin() + i + k);
  }
  const size_t tail = rows % k;
  if (tail > 0) {
    blocks.back().insert(blocks.back().end(), order.end() - tail, order.end());
  }
  return blocks;
}

}  // namespace

absl::StatusOr<Strategy> ParseStrategy(std::string_view name) {
  if (name == "top" || name == "top-then-minimize") return Strategy::kTop;
  if (name == "lca" || name == "lca-partition" ||
      name == "lca-partition-then-minimize") {
    return Strategy::kLcaPartition;
  }
  if (name == "random" || name == "random-partition" ||
      name == "random-partition-then-minimize") {
    return Strategy::kRandomPartition;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown anonymizer strategy '", internal::Sv(name), "'"));
}

std::string_view StrategyName(Strategy strategy) {
  switch (strategy) {
    case Strategy::kTop:
      return "top";
    case Strategy::kLcaPartition:
      return "lca";
    case Strategy::kRandomPartition:
      return "random";
  }
  return "unknown";
}

absl::Status CheckTriple(const Dataset& x, const GeneralizedDataset& y,
                         size_t k) {
  if (k < 2) {
    return absl::InvalidArgumentError(absl::StrCat("k must be >= 2, got ", k));
  }
  if (y.size() != x.size() || (x.size() > 0 && y.dims() != x.dims())) {
    return absl::InvalidArgumentError(
        absl::StrCat("shape mismatch: X is ", x.size(), "x", x.dims(),
                     ", Y is ", y.size(), "x", y.dims()));
  }
  for (size_t n = 0; n < y.size(); ++n) {
    for (size_t d = 0; d < y.dims(); ++d) {
      if (absl::Status s = y.hierarchy(d).ValidateCell(y.at(n, d)); !s.ok()) {
        return absl::FailedPreconditionError(
            absl::StrCat("row ", n, " dim ", d, ": ", s.message()));
      }
      if (!y.hierarchy(d).Contains(y.at(n, d), x.at(n, d))) {
        return absl::FailedPreconditionError(absl::StrCat(
            "row ", n, " dim ", d, " does not generalize the raw value"));
      }
    }
  }
  if (y.size() == 0) return absl::OkStatus();
  absl::StatusOr<bool> anonymous =
      IsKAnonymous(y, k, QuasiIdentifier::All(y.dims()));
  if (!anonymous.ok()) return anonymous.status();
  if (!*anonymous) {
    return absl::FailedPreconditionError(
        absl::StrCat("dataset is not ", k, "-anonymous"));
  }
  return absl::OkStatus();
}

absl::StatusOr<GeneralizedDataset> InitialAnonymize(
    const Dataset& x, std::vector<HierarchyPtr> hierarchies,
    const AnonymizerConfig& config) {
  if (config.k < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("k must be >= 2, got ", config.k));
  }
  if (absl::Status s = CheckSchema(x, hierarchies); !s.ok()) return s;
  if (x.size() > 0 && x.size() < config.k) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cannot ", config.k, "-anonymize ", x.size(), " rows"));
  }
  GeneralizedDataset y(hierarchies, x.size());
  if (config.strategy == Strategy::kTop || x.size() == 0) return y;

  const std::vector<std::vector<size_t>> blocks =
      config.strategy == Strategy::kLcaPartition
          ? LcaBlocks(x, hierarchies, config.k)
          : RandomBlocks(x.size(), config.k, config.seed);
  std::vector<Scalar> column;
  for (const std::vector<size_t>& block : blocks) {
    for (size_t d = 0; d < x.dims(); ++d) {
      column.clear();
      for (size_t n : block) column.push_back(x.at(n, d));
      absl::StatusOr<Cell> cell = LeastCommonNode(*hierarchies[d], column);
      if (!cell.ok()) return cell.status();
      for (size_t n : block) y.set(n, d, *cell);
    }
  }
  return y;
}

absl::StatusOr<GeneralizedDataset> SingleFlush(const Dataset& x,
                                               const GeneralizedDataset& y,
                                               size_t k, size_t n) {
  if (absl::Status s = CheckTriple(x, y, k); !s.ok()) return s;
  if (n >= y.size()) return absl::OutOfRangeError("row index out of range");
  FlushEngine engine(x, y, k);
  engine.SingleFlush(n, nullptr);
  return engine.result();
}

absl::StatusOr<GeneralizedDataset> GroupFlush(const Dataset& x,
                                              const GeneralizedDataset& y,
                                              size_t k, size_t n) {
  if (absl::Status s = CheckTriple(x, y, k); !s.ok()) return s;
  if (n >= y.size()) return absl::OutOfRangeError("row index out of range");
  FlushEngine engine(x, y, k);
  engine.GroupFlush(n, nullptr);
  return engine.result();
}

absl::StatusOr<GeneralizedDataset> SimulFlush(
    const Dataset& x, const GeneralizedDataset& y, size_t k,
    std::span<const Cell> class_record) {
  if (absl::Status s = CheckTriple(x, y, k); !s.ok()) return s;
  if (class_record.size() != y.dims()) {
    return absl::InvalidArgumentError("class record has the wrong dimension");
  }
  FlushEngine engine(x, y, k);
  std::optional<FlushEngine::ClassId> c = engine.FindClass(class_record);
  if (!c.has_value()) {
    return absl::NotFoundError("class record does not occur in the dataset");
  }
  engine.SimulFlush(*c, nullptr);
  return engine.result();
}

absl::StatusOr<GeneralizedDataset> Minimize(
    const Dataset& x, const GeneralizedDataset& y, size_t k,
    std::vector<RefinementMove>* trace) {
  if (absl::Status s = CheckTriple(x, y, k); !s.ok()) return s;
  FlushEngine engine(x, y, k);
  engine.Minimize(trace);
  return engine.result();
}

absl::StatusOr<GeneralizedDataset> Anonymize(
    const Dataset& x, std::vector<HierarchyPtr> hierarchies,
    const AnonymizerConfig& config) {
  absl::StatusOr<GeneralizedDataset> y =
      InitialAnonymize(x, std::move(hierarchies), config);
  if (!y.ok()) return y.status();
  return Minimize(x, *y, config.k);
}

}  // namespace downcode
