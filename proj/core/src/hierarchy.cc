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

#include "downcode/hierarchy.h"

#include <algorithm>
#include <utility>

#include "absl/strings/str_cat.h"
#include "downcode/scalar_format.h"

namespace downcode {
namespace {

absl::Status NodeError(const std::string& hierarchy, int depth,
                       absl::string_view message) {
  return absl::InvalidArgumentError(absl::StrCat(
      "hierarchy '", hierarchy, "' at depth ", depth, ": ", message));
}

// Closes intervals that end at the top of a real domain and checks that the
// set lies inside the domain.
absl::StatusOr<ValueSet> NormalizeSet(const AttributeDomain& domain,
                                      const ValueSet& set) {
  if (domain.kind() == AttributeDomain::Kind::kFinite) {
    if (set.kind() != ValueSet::Kind::kFinite) {
      return absl::InvalidArgumentError(
          "finite domain requires value-list node sets");
    }
    for (Scalar v : set.values()) {
      if (!domain.Contains(v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("value ", FormatScalar(v), " outside the domain"));
      }
    }
    return set;
  }
  if (set.kind() != ValueSet::Kind::kIntervals) {
    return absl::InvalidArgumentError(
        "real-interval domain requires interval node sets");
  }
  std::vector<Interval> intervals = set.intervals();
  for (Interval& i : intervals) {
    if (i.lo < domain.lo() || i.hi > domain.hi()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "interval [", FormatScalar(i.lo), ",", FormatScalar(i.hi),
          ") outside the domain"));
    }
    i.closed_hi = i.hi == domain.hi();
  }
  return ValueSet::Intervals(std::move(intervals));
}

}  // namespace

absl::StatusOr<Hierarchy> Hierarchy::Create(std::string name,
                                            AttributeDomain domain,
                                            std::vector<NodeSpec> nodes) {
  if (nodes.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("hierarchy '", name, "' has no nodes"));
  }
  Hierarchy h;
  h.name_ = std::move(name);
  h.domain_ = std::move(domain);
  h.nodes_.resize(nodes.size());

  for (NodeIndex i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("hierarchy '", h.name_, "': node ", i, " has no id"));
    }
    if (!h.by_id_.emplace(nodes[i].id, i).second) {
      return absl::InvalidArgumentError(absl::StrCat(
          "hierarchy '", h.name_, "': duplicate node id '", nodes[i].id, "'"));
    }
    h.nodes_[i].id = nodes[i].id;
    if (nodes[i].set.empty()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "hierarchy '", h.name_, "': node '", nodes[i].id, "' is empty"));
    }
    absl::StatusOr<ValueSet> set = NormalizeSet(h.domain_, nodes[i].set);
    if (!set.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("hierarchy '", h.name_, "': node '", nodes[i].id,
                       "': ", set.status().message()));
    }
    h.nodes_[i].set = *std::move(set);
    h.nodes_[i].singleton = h.nodes_[i].set.SingletonValue();
  }

  std::optional<NodeIndex> root;
  for (NodeIndex i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].parent.has_value()) {
      if (root.has_value()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "hierarchy '", h.name_, "': more than one root ('",
            h.nodes_[*root].id, "' and '", nodes[i].id, "')"));
      }
      root = i;
      continue;
    }
    auto it = h.by_id_.find(*nodes[i].parent);
    if (it == h.by_id_.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("hierarchy '", h.name_, "': node '", nodes[i].id,
                       "' has unknown parent '", *nodes[i].parent, "'"));
    }
    h.nodes_[i].parent = it->second;
    h.nodes_[it->second].children.push_back(i);
  }
  if (!root.has_value()) {
    return absl::InvalidArgumentError(
        absl::StrCat("hierarchy '", h.name_, "' has no root"));
  }
  h.root_ = *root;
  if (!(h.nodes_[h.root_].set == h.domain_.AsValueSet())) {
    return NodeError(h.name_, 0,
                     absl::StrCat("root '", h.nodes_[h.root_].id,
                                  "' does not cover the domain"));
  }

  // Iterative DFS assigns depths and Euler tour times; unreached nodes sit on
  // a parent cycle.
  std::vector<std::pair<NodeIndex, size_t>> stack = {{h.root_, 0}};
  std::vector<bool> seen(nodes.size(), false);
  seen[h.root_] = true;
  int clock = 0;
  h.nodes_[h.root_].enter = clock++;
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < h.nodes_[n].children.size()) {
      NodeIndex c = h.nodes_[n].children[next++];
      seen[c] = true;
      h.nodes_[c].depth = h.nodes_[n].depth + 1;
      h.max_depth_ = std::max(h.max_depth_, h.nodes_[c].depth);
      h.nodes_[c].enter = clock++;
      stack.emplace_back(c, 0);
    } else {
      h.nodes_[n].exit = clock++;
      stack.pop_back();
    }
  }
  for (NodeIndex i = 0; i < nodes.size(); ++i) {
    if (!seen[i]) {
      return absl::InvalidArgumentError(
          absl::StrCat("hierarchy '", h.name_, "': node '", h.nodes_[i].id,
                       "' is not reachable from the root"));
    }
  }

  for (NodeIndex n = 0; n < h.nodes_.size(); ++n) {
    const Node& node = h.nodes_[n];
    if (node.children.empty()) continue;
    const int child_depth = node.depth + 1;
    for (size_t a = 0; a < node.children.size(); ++a) {
      const Node& ca = h.nodes_[node.children[a]];
      if (ca.set == node.set) {
        return NodeError(h.name_, child_depth,
                         absl::StrCat("node '", ca.id,
                                      "' duplicates its parent '", node.id,
                                      "'"));
      }
      for (size_t b = a + 1; b < node.children.size(); ++b) {
        const Node& cb = h.nodes_[node.children[b]];
        if (ca.set.Intersects(cb.set)) {
          return NodeError(h.name_, child_depth,
                           absl::StrCat("siblings '", ca.id, "' and '", cb.id,
                                        "' under '", node.id, "' overlap"));
        }
      }
    }
    std::vector<const ValueSet*> parts;
    for (NodeIndex c : node.children) parts.push_back(&h.nodes_[c].set);
    if (!(ValueSet::Union(node.set.kind(), parts) == node.set)) {
      return NodeError(h.name_, child_depth,
                       absl::StrCat("children of '", node.id,
                                    "' do not partition it"));
    }
  }
  for (Node& node : h.nodes_) {
    for (NodeIndex c : node.children) {
      const ValueSet& set = h.nodes_[c].set;
      for (const Interval& i : set.intervals()) {
        node.child_index.emplace_back(i.lo, c);
      }
      for (Scalar v : set.values()) node.child_index.emplace_back(v, c);
    }
    std::sort(node.child_index.begin(), node.child_index.end());
  }
  if (h.domain_.kind() == AttributeDomain::Kind::kFinite) {
    // Preorder visits ancestors first, so deeper nodes overwrite.
    std::vector<NodeIndex> preorder(h.nodes_.size());
    for (NodeIndex i = 0; i < h.nodes_.size(); ++i) preorder[i] = i;
    std::sort(preorder.begin(), preorder.end(), [&](NodeIndex a, NodeIndex b) {
      return h.nodes_[a].enter < h.nodes_[b].enter;
    });
    const std::vector<Scalar>& values = h.domain_.values();
    h.finite_leaf_.assign(values.size(), h.root_);
    for (NodeIndex n : preorder) {
      for (Scalar v : h.nodes_[n].set.values()) {
        auto it = std::lower_bound(values.begin(), values.end(), v);
        h.finite_leaf_[it - values.begin()] = n;
      }
    }
  }
  return h;
}

std::optional<NodeIndex> Hierarchy::Find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

NodeIndex Hierarchy::Lca(NodeIndex a, NodeIndex b) const {
  while (!IsAncestorOrSelf(a, b)) a = *nodes_[a].parent;
  return a;
}

absl::StatusOr<bool> Hierarchy::NodeContains(NodeIndex node, Scalar v) const {
  if (node >= nodes_.size()) {
    return absl::OutOfRangeError(
        absl::StrCat("hierarchy '", name_, "' has no node ", node));
  }
  if (!domain_.Contains(v)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "value ", FormatScalar(v), " outside the domain of '", name_, "'"));
  }
  return nodes_[node].set.Contains(v);
}

absl::StatusOr<NodeIndex> Hierarchy::Locate(Scalar v) const {
  if (!domain_.Contains(v)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "value ", FormatScalar(v), " outside the domain of '", name_, "'"));
  }
  if (!finite_leaf_.empty()) {
    const std::vector<Scalar>& values = domain_.values();
    return finite_leaf_[std::lower_bound(values.begin(), values.end(), v) -
                        values.begin()];
  }
  NodeIndex n = root_;
  while (std::optional<NodeIndex> c = ChildContaining(n, v)) n = *c;
  return n;
}

std::optional<NodeIndex> Hierarchy::ChildContaining(NodeIndex node,
                                                    Scalar v) const {
  const auto& index = nodes_[node].child_index;
  auto it = std::upper_bound(
      index.begin(), index.end(), v,
      [](Scalar value, const std::pair<Scalar, NodeIndex>& p) {
        return value < p.first;
      });
  if (it == index.begin()) return std::nullopt;
  const NodeIndex c = std::prev(it)->second;
  if (nodes_[c].set.Contains(v)) return c;
  return std::nullopt;
}

Cell Hierarchy::Canonical(Cell c) const {
  if (c.is_node() && nodes_[c.node()].singleton.has_value()) {
    return Cell::Exact(*nodes_[c.node()].singleton);
  }
  return c;
}

bool Hierarchy::Contains(Cell c, Scalar v) const {
  if (c.is_exact()) return c.value() == v;
  return nodes_[c.node()].set.Contains(v);
}

bool Hierarchy::IsSubset(Cell a, Cell b) const {
  a = Canonical(a);
  b = Canonical(b);
  if (a.is_exact()) return Contains(b, a.value());
  if (b.is_exact()) return false;
  return IsAncestorOrSelf(b.node(), a.node());
}

bool Hierarchy::Intersects(Cell a, Cell b) const {
  a = Canonical(a);
  b = Canonical(b);
  if (a.is_exact()) return Contains(b, a.value());
  if (b.is_exact()) return Contains(a, b.value());
  return IsAncestorOrSelf(a.node(), b.node()) ||
         IsAncestorOrSelf(b.node(), a.node());
}

absl::Status Hierarchy::ValidateCell(Cell c) const {
  if (c.is_node()) {
    if (c.node() >= nodes_.size()) {
      return absl::OutOfRangeError(
          absl::StrCat("hierarchy '", name_, "' has no node ", c.node()));
    }
    return absl::OkStatus();
  }
  if (!domain_.Contains(c.value())) {
    return absl::InvalidArgumentError(
        absl::StrCat("value ", FormatScalar(c.value()),
                     " outside the domain of '", name_, "'"));
  }
  return absl::OkStatus();
}

std::vector<NodeSpec> Hierarchy::Specs() const {
  std::vector<NodeSpec> specs;
  specs.reserve(nodes_.size());
  for (const Node& n : nodes_) {
    NodeSpec s{n.id, std::nullopt, n.set};
    if (n.parent.has_value()) s.parent = nodes_[*n.parent].id;
    specs.push_back(std::move(s));
  }
  return specs;
}

}  // namespace downcode
