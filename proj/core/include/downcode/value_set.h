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

#ifndef DOWNCODE_VALUE_SET_H_
#define DOWNCODE_VALUE_SET_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace downcode {

// Attribute values are binary64 scalars. Finite domains hold the same type,
// so categorical attributes are coded as numbers before anonymization.
using Scalar = double;

// Half-open interval [lo, hi). `closed_hi` is only ever set on intervals whose
// upper endpoint coincides with the top of a real domain.
struct Interval {
  Scalar lo = 0;
  Scalar hi = 0;
  bool closed_hi = false;

  bool Contains(Scalar v) const {
    return lo <= v && (v < hi || (closed_hi && v == hi));
  }

  friend bool operator==(const Interval&, const Interval&) = default;
};

// A subset of an attribute domain: either a finite union of disjoint sorted
// intervals, or a finite set of scalars.
class ValueSet {
 public:
  enum class Kind { kIntervals, kFinite };

  ValueSet() = default;

  // Sorts and merges touching or overlapping intervals.
  static ValueSet Intervals(std::vector<Interval> intervals);
  // Sorts and removes duplicates.
  static ValueSet Finite(std::vector<Scalar> values);

  Kind kind() const { return kind_; }
  bool empty() const;
  bool Contains(Scalar v) const;

  // Both operands must be of the same kind; mixed kinds are never related.
  bool IsSubsetOf(const ValueSet& other) const;
  bool Intersects(const ValueSet& other) const;

  // Set when the set holds exactly one scalar.
  std::optional<Scalar> SingletonValue() const;

  const std::vector<Interval>& intervals() const { return intervals_; }
  const std::vector<Scalar>& values() const { return values_; }

  // Union of `sets`, all of which must share `kind`.
  static ValueSet Union(Kind kind, const std::vector<const ValueSet*>& sets);

  std::string DebugString() const;

  friend bool operator==(const ValueSet&, const ValueSet&) = default;

 private:
  Kind kind_ = Kind::kFinite;
  std::vector<Interval> intervals_;
  std::vector<Scalar> values_;
};

// The universe a single attribute ranges over.
class AttributeDomain {
 public:
  enum class Kind { kRealInterval, kFinite };

  AttributeDomain() = default;

  // Closed interval [lo, hi] with lo < hi.
  static absl::StatusOr<AttributeDomain> RealInterval(Scalar lo, Scalar hi);
  // At least one distinct finite value.
  static absl::StatusOr<AttributeDomain> Finite(std::vector<Scalar> values);

  Kind kind() const { return kind_; }
  Scalar lo() const { return lo_; }
  Scalar hi() const { return hi_; }
  const std::vector<Scalar>& values() const { return values_; }

  bool Contains(Scalar v) const;

  // The whole domain as a value set.
  ValueSet AsValueSet() const;

  friend bool operator==(const AttributeDomain&,
                         const AttributeDomain&) = default;

 private:
  Kind kind_ = Kind::kFinite;
  Scalar lo_ = 0;
  Scalar hi_ = 0;
  std::vector<Scalar> values_;
};

}  // namespace downcode

#endif  // DOWNCODE_VALUE_SET_H_
