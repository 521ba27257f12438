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

#ifndef DOWNCODE_HIERARCHY_H_
#define DOWNCODE_HIERARCHY_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "downcode/value_set.h"

namespace downcode {

using NodeIndex = uint32_t;

// One coordinate of a generalized record: an exact domain value or a node of
// the dimension's hierarchy. Exact values are the implicit leaves of every
// hierarchy, so a cell never refers to a singleton node (see
// Hierarchy::Canonical). Equality is representational.
class Cell {
 public:
  Cell() = default;

  static Cell Exact(Scalar v) { return Cell(true, v == 0 ? 0.0 : v, 0); }
  static Cell Node(NodeIndex n) { return Cell(false, 0.0, n); }

  bool is_exact() const { return exact_; }
  bool is_node() const { return !exact_; }
  Scalar value() const { return value_; }
  NodeIndex node() const { return node_; }

  friend bool operator==(const Cell& a, const Cell& b) {
    if (a.exact_ != b.exact_) return false;
    return a.exact_ ? a.value_ == b.value_ : a.node_ == b.node_;
  }

  template <typename H>
  friend H AbslHashValue(H h, const Cell& c) {
    if (c.exact_) return H::combine(std::move(h), true, c.value_);
    return H::combine(std::move(h), false, c.node_);
  }

 private:
  Cell(bool exact, Scalar value, NodeIndex node)
      : value_(value), node_(node), exact_(exact) {}

  Scalar value_ = 0.0;
  NodeIndex node_ = 0;
  bool exact_ = true;
};

// Input description of one hierarchy node.
struct NodeSpec {
  std::string id;
  std::optional<std::string> parent;
  ValueSet set;
};

// A generalization hierarchy: a rooted tree of value sets where every
// internal node is partitioned by its children and the root is the whole
// attribute domain. Immutable after Create().
class Hierarchy {
 public:
  // Validates the tree. Partition violations are reported with the depth and
  // the ids of the offending nodes. Nodes keep their input order, which is
  // also the order children are scanned in.
  static absl::StatusOr<Hierarchy> Create(std::string name,
                                          AttributeDomain domain,
                                          std::vector<NodeSpec> nodes);

  const std::string& name() const { return name_; }
  const AttributeDomain& domain() const { return domain_; }
  size_t size() const { return nodes_.size(); }
  NodeIndex root() const { return root_; }

  const std::string& id(NodeIndex n) const { return nodes_[n].id; }
  std::optional<NodeIndex> Find(std::string_view id) const;
  std::optional<NodeIndex> parent(NodeIndex n) const {
    return nodes_[n].parent;
  }
  const std::vector<NodeIndex>& children(NodeIndex n) const {
    return nodes_[n].children;
  }
  int depth(NodeIndex n) const { return nodes_[n].depth; }
  int max_depth() const { return max_depth_; }
  const ValueSet& set(NodeIndex n) const { return nodes_[n].set; }
  std::optional<Scalar> singleton(NodeIndex n) const {
    return nodes_[n].singleton;
  }

  bool IsAncestorOrSelf(NodeIndex ancestor, NodeIndex node) const {
    return nodes_[ancestor].enter <= nodes_[node].enter &&
           nodes_[node].exit <= nodes_[ancestor].exit;
  }
  NodeIndex Lca(NodeIndex a, NodeIndex b) const;

  // Checked membership: fails on unknown node or out-of-domain value.
  absl::StatusOr<bool> NodeContains(NodeIndex node, Scalar v) const;

  // Deepest node whose set contains `v`.
  absl::StatusOr<NodeIndex> Locate(Scalar v) const;
  // The explicit child of `node` containing `v`, if any.
  std::optional<NodeIndex> ChildContaining(NodeIndex node, Scalar v) const;

  // Cell algebra. Cells are assumed valid for this hierarchy.
  bool Contains(Cell c, Scalar v) const;
  bool IsSubset(Cell a, Cell b) const;
  bool Intersects(Cell a, Cell b) const;
  Cell Canonical(Cell c) const;
  Cell RootCell() const { return Canonical(Cell::Node(root_)); }
  // Depth of a cell; exact values sit one level below the deepest node.
  int CellDepth(Cell c) const {
    return c.is_exact() ? max_depth_ + 1 : nodes_[c.node()].depth;
  }
  absl::Status ValidateCell(Cell c) const;

  std::vector<NodeSpec> Specs() const;

 private:
  struct Node {
    std::string id;
    std::optional<NodeIndex> parent;
    std::vector<NodeIndex> children;
    // (piece start, child) over every interval or value of every child,
    // sorted by start.
    std::vector<std::pair<Scalar, NodeIndex>> child_index;
    ValueSet set;
    std::optional<Scalar> singleton;
    int depth = 0;
    int enter = 0;
    int exit = 0;
  };

  Hierarchy() = default;

  std::string name_;
  AttributeDomain domain_;
  std::vector<Node> nodes_;
  absl::flat_hash_map<std::string, NodeIndex> by_id_;
  NodeIndex root_ = 0;
  int max_depth_ = 0;
  // Deepest node per value of a finite domain, aligned with domain_.values().
  std::vector<NodeIndex> finite_leaf_;
};

using HierarchyPtr = std::shared_ptr<const Hierarchy>;

}  // namespace downcode

#endif  // DOWNCODE_HIERARCHY_H_
