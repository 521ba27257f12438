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

#include "flush_engine.h"

#include <algorithm>
#include <cassert>
#include <utility>

#include "downcode/refinement.h"

namespace downcode::internal {

FlushEngine::FlushEngine(const Dataset& x, const GeneralizedDataset& y,
                         size_t k)
    : x_(x), y_(y), k_(k), row_class_(y.size(), 0) {
  for (const std::vector<size_t>& rows :
       EquivalenceClasses(y_, QuasiIdentifier::All(y_.dims()))) {
    const ClassId c = Intern(y_.record(rows.front()));
    classes_[c].rows = rows;
    order_.emplace(rows.front(), c);
    for (size_t n : rows) row_class_[n] = c;
  }
}

FlushEngine::ClassId FlushEngine::Intern(GeneralizedRecord record) {
  auto [it, inserted] =
      index_.emplace(record, static_cast<ClassId>(classes_.size()));
  if (inserted) classes_.push_back(Class{std::move(record), {}, 0});
  return it->second;
}

std::optional<FlushEngine::ClassId> FlushEngine::FindClass(
    std::span<const Cell> record) const {
  GeneralizedRecord key;
  for (size_t d = 0; d < record.size() && d < y_.dims(); ++d) {
    key.push_back(y_.hierarchy(d).Canonical(record[d]));
  }
  auto it = index_.find(key);
  if (it == index_.end() || classes_[it->second].rows.empty()) {
    return std::nullopt;
  }
  return it->second;
}

void FlushEngine::Move(size_t n, ClassId to) {
  const ClassId from = row_class_[n];
  if (from == to) return;
  if (logging_) log_.emplace_back(n, from);

  Class& src = classes_[from];
  const size_t old_front = src.rows.front();
  src.rows.erase(std::lower_bound(src.rows.begin(), src.rows.end(), n));
  ++src.version;
  if (old_front == n) {
    order_.erase({n, from});
    if (!src.rows.empty()) order_.emplace(src.rows.front(), from);
  }

  Class& dst = classes_[to];
  if (dst.rows.empty()) {
    order_.emplace(n, to);
  } else if (n < dst.rows.front()) {
    order_.erase({dst.rows.front(), to});
    order_.emplace(n, to);
  }
  dst.rows.insert(std::lower_bound(dst.rows.begin(), dst.rows.end(), n), n);
  ++dst.version;

  row_class_[n] = to;
  y_.SetRow(n, dst.record);
}

void FlushEngine::Rollback(size_t mark) {
  const bool was_logging = logging_;
  logging_ = false;
  while (log_.size() > mark) {
    auto [n, from] = log_.back();
    log_.pop_back();
    Move(n, from);
  }
  logging_ = was_logging;
}

std::optional<Cell> FlushEngine::ChildOf(size_t d, Cell cell,
                                         Scalar v) const {
  if (cell.is_exact()) return std::nullopt;
  const Hierarchy& h = y_.hierarchy(d);
  if (h.children(cell.node()).empty()) return Cell::Exact(v);
  std::optional<NodeIndex> child = h.ChildContaining(cell.node(), v);
  if (!child.has_value()) return std::nullopt;
  return h.Canonical(Cell::Node(*child));
}

double FlushEngine::ChildRank(size_t d, Cell cell, Cell child) const {
  const Hierarchy& h = y_.hierarchy(d);
  const std::vector<NodeIndex>& children = h.children(cell.node());
  if (children.empty()) return child.value();
  for (size_t i = 0; i < children.size(); ++i) {
    if (h.Canonical(Cell::Node(children[i])) == child) {
      return static_cast<double>(i);
    }
  }
  return static_cast<double>(children.size());
}

std::optional<FlushEngine::ClassId> FlushEngine::AdoptTarget(size_t n) const {
  const ClassId own = row_class_[n];
  const GeneralizedRecord& mine = classes_[own].record;
  for (const auto& [front, c] : order_) {
    if (c == own) continue;
    const GeneralizedRecord& other = classes_[c].record;
    bool fits = true;
    for (size_t d = 0; d < y_.dims() && fits; ++d) {
      const Hierarchy& h = y_.hierarchy(d);
      fits = h.Contains(other[d], x_.at(n, d)) && h.IsSubset(other[d], mine[d]);
    }
    if (fits) return c;
  }
  return std::nullopt;
}

bool FlushEngine::SingleFlush(size_t n, std::vector<RefinementMove>* trace) {
  const ClassId c = row_class_[n];
  if (classes_[c].rows.size() <= k_) return false;
  std::optional<ClassId> target = AdoptTarget(n);
  if (!target.has_value()) return false;
  if (trace != nullptr) {
    trace->push_back({RefinementMove::Kind::kAdoptSingle, classes_[c].record,
                      classes_[*target].record, {n}, std::nullopt});
  }
  Move(n, *target);
  CheckInvariants();
  return true;
}

bool FlushEngine::Split(ClassId c, size_t phantoms,
                        std::vector<RefinementMove>* trace) {
  const GeneralizedRecord record = classes_[c].record;
  const std::vector<size_t> rows = classes_[c].rows;
  const size_t real = rows.size();
  const size_t total = real + phantoms;
  if (total < 2 * k_) return false;

  for (size_t d = 0; d < y_.dims(); ++d) {
    const Cell cell = record[d];
    if (cell.is_exact()) continue;
    struct Bucket {
      Cell child;
      double rank = 0;
      std::vector<size_t> members;
    };
    std::vector<Bucket> buckets;
    absl::flat_hash_map<Cell, size_t> bucket_of;
    bool viable = true;
    for (size_t n : rows) {
      std::optional<Cell> child = ChildOf(d, cell, x_.at(n, d));
      if (!child.has_value()) continue;
      auto [it, inserted] = bucket_of.emplace(*child, buckets.size());
      if (inserted) {
        // With phantoms every real row must share one child.
        if (phantoms > 0 && !buckets.empty()) {
          viable = false;
          break;
        }
        buckets.push_back({*child, ChildRank(d, cell, *child), {}});
      }
      buckets[it->second].members.push_back(n);
    }
    if (!viable) continue;
    std::sort(buckets.begin(), buckets.end(),
              [](const Bucket& a, const Bucket& b) { return a.rank < b.rank; });

    for (auto& [child, rank, members] : buckets) {
      size_t r = 0;
      if (phantoms > 0) {
        if (members.size() != real) continue;
        r = real;
      } else {
        const size_t in_child = members.size();
        const size_t rest = total - in_child;
        r = (rest == 0 || rest >= k_) ? in_child : total - k_;
        if (r < k_ || r > in_child) continue;
      }
      GeneralizedRecord target = record;
      target[d] = child;
      const ClassId to = Intern(std::move(target));
      members.resize(r);
      if (trace != nullptr) {
        trace->push_back({RefinementMove::Kind::kGroupSplit, record,
                          classes_[to].record, members, d});
      }
      for (size_t n : members) Move(n, to);
      return true;
    }
  }
  return false;
}

bool FlushEngine::GroupFlush(size_t n, std::vector<RefinementMove>* trace) {
  const ClassId c = row_class_[n];
  Class& cls = classes_[c];
  if (cls.rows.size() < 2 * k_) return false;
  if (cls.failed_group_version == cls.version) return false;
  if (!Split(c, 0, trace)) {
    classes_[c].failed_group_version = classes_[c].version;
    return false;
  }
  CheckInvariants();
  return true;
}

bool FlushEngine::SimulFlush(ClassId c, std::vector<RefinementMove>* trace) {
  if (classes_[c].rows.empty()) return false;
  const GeneralizedRecord record = classes_[c].record;
  const std::vector<size_t> rows = classes_[c].rows;
  const size_t mark = log_.size();
  logging_ = true;

  for (size_t n : rows) {
    if (std::optional<ClassId> target = AdoptTarget(n)) Move(n, *target);
  }
  const size_t remaining = classes_[c].rows.size();
  std::vector<RefinementMove> split;
  bool ok = remaining == 0 || (remaining >= k_ && Split(c, k_, &split));
  ok = ok && classes_[c].rows.empty();
  for (size_t i = mark; ok && i < log_.size(); ++i) {
    ok = classes_[row_class_[log_[i].first]].rows.size() >= k_;
  }
  if (!ok) {
    Rollback(mark);
    logging_ = false;
    return false;
  }
  log_.resize(mark);
  logging_ = false;
  if (trace != nullptr) {
    RefinementMove move;
    move.from = record;
    move.rows = rows;
    if (split.empty()) {
      move.kind = RefinementMove::Kind::kClassMerge;
    } else {
      move.kind = RefinementMove::Kind::kClassDescent;
      move.to = split.front().to;
      move.dim = split.front().dim;
    }
    trace->push_back(std::move(move));
  }
  CheckInvariants();
  return true;
}

void FlushEngine::Minimize(std::vector<RefinementMove>* trace) {
  for (;;) {
    bool any = false;
    for (bool changed = true; changed;) {
      changed = false;
      for (size_t n = 0; n < y_.size(); ++n) {
        changed = SingleFlush(n, trace) || changed;
      }
      any = any || changed;
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (size_t n = 0; n < y_.size(); ++n) {
        changed = GroupFlush(n, trace) || changed;
      }
      any = any || changed;
    }
    for (bool changed = true; changed;) {
      changed = false;
      std::vector<ClassId> snapshot;
      for (const auto& [front, c] : order_) snapshot.push_back(c);
      for (ClassId c : snapshot) changed = SimulFlush(c, trace) || changed;
      any = any || changed;
    }
    if (!any) break;
  }
}

void FlushEngine::CheckInvariants() const {
#ifndef NDEBUG
  assert(CheckTriple(x_, y_, k_).ok());
#endif
}

}  // namespace downcode::internal
