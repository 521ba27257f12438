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

#include "downcode/value_set.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "downcode/scalar_format.h"

namespace downcode {

ValueSet ValueSet::Intervals(std::vector<Interval> intervals) {
  std::erase_if(intervals, [](const Interval& i) { return !(i.lo < i.hi); });
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  ValueSet set;
  set.kind_ = Kind::kIntervals;
  for (const Interval& next : intervals) {
    if (!set.intervals_.empty() && next.lo <= set.intervals_.back().hi) {
      Interval& cur = set.intervals_.back();
      if (next.hi > cur.hi) {
        cur.hi = next.hi;
        cur.closed_hi = next.closed_hi;
      } else if (next.hi == cur.hi) {
        cur.closed_hi = cur.closed_hi || next.closed_hi;
      }
    } else {
      set.intervals_.push_back(next);
    }
  }
  return set;
}

ValueSet ValueSet::Finite(std::vector<Scalar> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  ValueSet set;
  set.kind_ = Kind::kFinite;
  set.values_ = std::move(values);
  return set;
}

bool ValueSet::empty() const {
  return kind_ == Kind::kIntervals ? intervals_.empty() : values_.empty();
}

bool ValueSet::Contains(Scalar v) const {
  if (kind_ == Kind::kFinite) {
    return std::binary_search(values_.begin(), values_.end(), v);
  }
  auto it = std::upper_bound(
      intervals_.begin(), intervals_.end(), v,
      [](Scalar value, const Interval& i) { return value < i.lo; });
  if (it == intervals_.begin()) return false;
  return std::prev(it)->Contains(v);
}

bool ValueSet::IsSubsetOf(const ValueSet& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == Kind::kFinite) {
    return std::includes(other.values_.begin(), other.values_.end(),
                         values_.begin(), values_.end());
  }
  for (const Interval& a : intervals_) {
    auto it = std::upper_bound(
        other.intervals_.begin(), other.intervals_.end(), a.lo,
        [](Scalar value, const Interval& i) { return value < i.lo; });
    if (it == other.intervals_.begin()) return false;
    const Interval& b = *std::prev(it);
    if (a.hi < b.hi) continue;
    if (a.hi == b.hi && (!a.closed_hi || b.closed_hi)) continue;
    return false;
  }
  return true;
}

bool ValueSet::Intersects(const ValueSet& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == Kind::kFinite) {
    auto a = values_.begin();
    auto b = other.values_.begin();
    while (a != values_.end() && b != other.values_.end()) {
      if (*a == *b) return true;
      if (*a < *b) {
        ++a;
      } else {
        ++b;
      }
    }
    return false;
  }
  size_t i = 0;
  size_t j = 0;
  while (i < intervals_.size() && j < other.intervals_.size()) {
    const Interval& a = intervals_[i];
    const Interval& b = other.intervals_[j];
    const Scalar lo = std::max(a.lo, b.lo);
    const Scalar hi = std::min(a.hi, b.hi);
    if (lo < hi) return true;
    if (lo == hi && a.Contains(lo) && b.Contains(lo)) return true;
    if (a.hi < b.hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

std::optional<Scalar> ValueSet::SingletonValue() const {
  if (kind_ == Kind::kFinite && values_.size() == 1) return values_.front();
  return std::nullopt;
}

ValueSet ValueSet::Union(Kind kind, const std::vector<const ValueSet*>& sets) {
  if (kind == Kind::kFinite) {
    std::vector<Scalar> values;
    for (const ValueSet* s : sets) {
      values.insert(values.end(), s->values_.begin(), s->values_.end());
    }
    return Finite(std::move(values));
  }
  std::vector<Interval> intervals;
  for (const ValueSet* s : sets) {
    intervals.insert(intervals.end(), s->intervals_.begin(),
                     s->intervals_.end());
  }
  return Intervals(std::move(intervals));
}

std::string ValueSet::DebugString() const {
  if (kind_ == Kind::kFinite) {
    return absl::StrCat(
        "{",
        absl::StrJoin(values_, ",",
                      [](std::string* out, Scalar v) {
                        out->append(FormatScalar(v));
                      }),
        "}");
  }
  return absl::StrJoin(intervals_, "u", [](std::string* out, const Interval& i) {
    absl::StrAppend(out, "[", FormatScalar(i.lo), ",", FormatScalar(i.hi),
                    i.closed_hi ? "]" : ")");
  });
}

absl::StatusOr<AttributeDomain> AttributeDomain::RealInterval(Scalar lo,
                                                              Scalar hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    return absl::InvalidArgumentError(
        absl::StrCat("real-interval domain needs finite lo < hi, got [",
                     FormatScalar(lo), ", ", FormatScalar(hi), "]"));
  }
  AttributeDomain domain;
  domain.kind_ = Kind::kRealInterval;
  domain.lo_ = lo;
  domain.hi_ = hi;
  return domain;
}

absl::StatusOr<AttributeDomain> AttributeDomain::Finite(
    std::vector<Scalar> values) {
  for (Scalar v : values) {
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError("finite domain values must be finite");
    }
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.empty()) {
    return absl::InvalidArgumentError("finite domain needs at least one value");
  }
  AttributeDomain domain;
  domain.kind_ = Kind::kFinite;
  domain.values_ = std::move(values);
  domain.lo_ = domain.values_.front();
  domain.hi_ = domain.values_.back();
  return domain;
}

bool AttributeDomain::Contains(Scalar v) const {
  if (kind_ == Kind::kFinite) {
    return std::binary_search(values_.begin(), values_.end(), v);
  }
  return lo_ <= v && v <= hi_;
}

ValueSet AttributeDomain::AsValueSet() const {
  if (kind_ == Kind::kFinite) return ValueSet::Finite(values_);
  return ValueSet::Intervals({Interval{lo_, hi_, /*closed_hi=*/true}});
}

}  // namespace downcode
