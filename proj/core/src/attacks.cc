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

#include "downcode/attacks.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"

namespace downcode {
namespace {

// Per-dimension nodes of one cluster.
struct ClusterNodes {
  NodeIndex whole;
  NodeIndex sml;
  NodeIndex big;
};

absl::StatusOr<ClusterNodes> ResolveCluster(const Hierarchy& h,
                                            const ClusteredParams& p,
                                            size_t t) {
  const Scalar center = p.centers[t - 1];
  std::optional<NodeIndex> whole = h.ChildContaining(h.root(), center);
  if (!whole.has_value() || h.children(*whole).size() != 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "hierarchy '", h.name(), "' has no two-way cluster node for t=", t));
  }
  std::optional<NodeIndex> sml = h.ChildContaining(*whole, center);
  if (!sml.has_value()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "hierarchy '", h.name(), "' has no inner node for t=", t));
  }
  const std::vector<NodeIndex>& kids = h.children(*whole);
  const NodeIndex big = kids[0] == *sml ? kids[1] : kids[0];
  return ClusterNodes{*whole, *sml, big};
}

// Keeps `y` wherever the proposed cell is not inside it, so the output never
// leaves the published record.
void WriteSafe(GeneralizedDataset& z, const GeneralizedDataset& y, size_t n,
               std::span<const Cell> proposed) {
  for (size_t d = 0; d < y.dims(); ++d) {
    const Hierarchy& h = y.hierarchy(d);
    const Cell cell = h.Canonical(proposed[d]);
    z.set(n, d, h.IsSubset(cell, y.at(n, d)) ? cell : y.at(n, d));
  }
}

std::vector<size_t> ChangedRows(const GeneralizedDataset& z,
                                const GeneralizedDataset& y) {
  std::vector<size_t> changed;
  for (size_t n = 0; n < y.size(); ++n) {
    if (!std::equal(z.row(n).begin(), z.row(n).end(), y.row(n).begin())) {
      changed.push_back(n);
    }
  }
  return changed;
}

// For each dimension, the node id of {0..m} for every m in 1..T.
absl::StatusOr<std::vector<std::vector<NodeIndex>>> PrefixNodes(
    const GeneralizedDataset& y, size_t* top) {
  std::vector<std::vector<NodeIndex>> prefix(y.dims());
  for (size_t d = 0; d < y.dims(); ++d) {
    const Hierarchy& h = y.hierarchy(d);
    const AttributeDomain& domain = h.domain();
    const std::vector<Scalar>& values = domain.values();
    bool shaped = domain.kind() == AttributeDomain::Kind::kFinite &&
                  values.size() >= 2;
    for (size_t i = 0; shaped && i < values.size(); ++i) {
      shaped = values[i] == static_cast<Scalar>(i);
    }
    const size_t t = values.size() - 1;
    if (shaped && d > 0 && t != *top) shaped = false;
    if (!shaped) {
      return absl::InvalidArgumentError(absl::StrCat(
          "dimension ", d, " does not use a prefix hierarchy over {0..T}"));
    }
    *top = t;
    prefix[d].assign(t + 1, 0);
    std::vector<bool> found(t + 1, false);
    for (NodeIndex n = 0; n < h.size(); ++n) {
      const std::vector<Scalar>& set = h.set(n).values();
      if (set.size() < 2 || set.front() != 0 ||
          set.back() != static_cast<Scalar>(set.size() - 1)) {
        continue;
      }
      prefix[d][set.size() - 1] = n;
      found[set.size() - 1] = true;
    }
    for (size_t m = 1; m <= t; ++m) {
      if (!found[m]) {
        return absl::InvalidArgumentError(absl::StrCat(
            "dimension ", d, " lacks the prefix node [0,", m, "]"));
      }
    }
  }
  return prefix;
}

}  // namespace

std::string_view ClusterActionName(ClusterAction action) {
  switch (action) {
    case ClusterAction::kDowncoded:
      return "downcoded";
    case ClusterAction::kPassthroughSize:
      return "passthrough-size";
    case ClusterAction::kPassthroughBalance:
      return "passthrough-balance";
    case ClusterAction::kSkippedNonConforming:
      return "skipped-nonconforming";
    case ClusterAction::kSkippedNoRow:
      return "skipped-no-row";
  }
  return "unknown";
}

size_t DowncodeOutput::downcoded() const {
  return std::count_if(audit.begin(), audit.end(), [](const ClusterAudit& a) {
    return a.action == ClusterAction::kDowncoded;
  });
}

absl::StatusOr<DowncodeOutput> DowncodeClustered(const GeneralizedDataset& y,
                                                 size_t k,
                                                 const ClusteredParams& p) {
  if (absl::Status s = p.Validate(); !s.ok()) return s;
  if (k < 2) return absl::InvalidArgumentError("k must be >= 2");
  const size_t dims = y.dims();

  // nodes[d][t - 1]
  std::vector<std::vector<ClusterNodes>> nodes(dims);
  for (size_t d = 0; d < dims; ++d) {
    for (size_t t = 1; t <= p.t; ++t) {
      absl::StatusOr<ClusterNodes> c = ResolveCluster(y.hierarchy(d), p, t);
      if (!c.ok()) return c.status();
      nodes[d].push_back(*c);
    }
  }

  DowncodeOutput out;
  out.z = y;
  for (size_t t = 1; t <= p.t; ++t) {
    std::vector<size_t> rows;
    for (size_t n = 0; n < y.size(); ++n) {
      for (size_t d = 0; d < dims; ++d) {
        if (y.hierarchy(d).IsSubset(y.at(n, d),
                                    Cell::Node(nodes[d][t - 1].whole))) {
          rows.push_back(n);
          break;
        }
      }
    }
    ClusterAudit audit;
    audit.t = t;
    audit.rows = rows.size();
    if (rows.size() != k) {
      audit.action = ClusterAction::kPassthroughSize;
      out.audit.push_back(audit);
      continue;
    }
    for (size_t n : rows) {
      if (!std::equal(y.row(n).begin(), y.row(n).end(),
                      y.row(rows.front()).begin())) {
        return absl::FailedPreconditionError(absl::StrCat(
            "cluster ", t, " has ", k, " rows that are not identical"));
      }
    }
    const std::span<const Cell> yt = y.row(rows.front());
    size_t coarse = 0;
    for (size_t d = 0; d < dims; ++d) {
      if (yt[d] == Cell::Node(nodes[d][t - 1].whole)) ++coarse;
    }
    audit.coarse_dims = coarse;
    const double half = dims / 2.0;
    if (std::fabs(static_cast<double>(coarse) - half) > dims / 8.0) {
      audit.action = ClusterAction::kPassthroughBalance;
      out.audit.push_back(audit);
      continue;
    }
    GeneralizedRecord singled(dims);
    GeneralizedRecord inner(dims);
    for (size_t d = 0; d < dims; ++d) {
      const ClusterNodes& c = nodes[d][t - 1];
      inner[d] = Cell::Node(c.sml);
      singled[d] = Cell::Node(
          yt[d] == Cell::Node(c.whole) ? c.big : c.sml);
    }
    WriteSafe(out.z, y, rows.front(), singled);
    for (size_t i = 1; i < rows.size(); ++i) WriteSafe(out.z, y, rows[i], inner);
    audit.action = ClusterAction::kDowncoded;
    audit.target_row = rows.front();
    out.audit.push_back(audit);
  }
  out.changed_rows = ChangedRows(out.z, y);
  return out;
}

absl::StatusOr<DowncodeOutput> DowncodePrefix(const GeneralizedDataset& y) {
  size_t top = 0;
  absl::StatusOr<std::vector<std::vector<NodeIndex>>> prefix =
      PrefixNodes(y, &top);
  if (!prefix.ok()) return prefix.status();
  const size_t dims = y.dims();

  // Spike value behind each prefix node, per dimension.
  std::vector<std::map<NodeIndex, size_t>> spike_of(dims);
  for (size_t d = 0; d < dims; ++d) {
    for (size_t m = 1; m <= top; ++m) spike_of[d][(*prefix)[d][m]] = m;
  }
  std::map<size_t, std::vector<size_t>> carriers;
  for (size_t n = 0; n < y.size(); ++n) {
    for (size_t d = 0; d < dims; ++d) {
      const Cell c = y.at(n, d);
      if (c.is_exact()) continue;
      auto it = spike_of[d].find(c.node());
      if (it == spike_of[d].end()) continue;
      std::vector<size_t>& rows = carriers[it->second];
      if (rows.empty() || rows.back() != n) rows.push_back(n);
    }
  }

  DowncodeOutput out;
  out.z = y;
  std::set<size_t> replaced;
  for (const auto& [t, rows] : carriers) {
    ClusterAudit audit;
    audit.t = t;
    audit.rows = rows.size();
    bool identical = true;
    for (size_t n : rows) {
      identical = identical && std::equal(y.row(n).begin(), y.row(n).end(),
                                          y.row(rows.front()).begin());
    }
    if (!identical) {
      audit.action = ClusterAction::kSkippedNonConforming;
      out.audit.push_back(audit);
      continue;
    }
    const std::span<const Cell> yt = y.row(rows.front());
    GeneralizedRecord singled(dims);
    size_t spiked = 0;
    for (size_t d = 0; d < dims; ++d) {
      const Hierarchy& h = y.hierarchy(d);
      const Cell c = yt[d];
      const Scalar upper = c.is_exact() ? c.value() : h.set(c.node()).values().back();
      const Scalar spike = static_cast<Scalar>(t);
      if (upper < spike) {
        singled[d] = Cell::Exact(0);
      } else if (upper == spike) {
        singled[d] = Cell::Exact(spike);
        if (c.is_node()) ++spiked;
      } else {
        singled[d] = Cell::Node((*prefix)[d][t]);
      }
    }
    audit.coarse_dims = spiked;
    std::optional<size_t> target;
    for (size_t n : rows) {
      if (!replaced.contains(n)) {
        target = n;
        break;
      }
    }
    if (!target.has_value()) {
      audit.action = ClusterAction::kSkippedNoRow;
      out.audit.push_back(audit);
      continue;
    }
    WriteSafe(out.z, y, *target, singled);
    replaced.insert(*target);
    audit.action = ClusterAction::kDowncoded;
    audit.target_row = *target;
    out.audit.push_back(audit);
  }
  out.changed_rows = ChangedRows(out.z, y);
  return out;
}

std::vector<Predicate> PredicatesFrom(const DowncodeOutput& out) {
  std::vector<Predicate> psi;
  for (const ClusterAudit& a : out.audit) {
    if (a.action != ClusterAction::kDowncoded || !a.target_row.has_value()) {
      continue;
    }
    psi.push_back({out.z.record(*a.target_row), a.t, out.z.hierarchies()});
  }
  return psi;
}

absl::StatusOr<std::vector<Predicate>> PsoClustered(
    const GeneralizedDataset& y, size_t k, const ClusteredParams& p) {
  absl::StatusOr<DowncodeOutput> out = DowncodeClustered(y, k, p);
  if (!out.ok()) return out.status();
  return PredicatesFrom(*out);
}

absl::StatusOr<std::vector<Predicate>> PsoPrefix(const GeneralizedDataset& y) {
  absl::StatusOr<DowncodeOutput> out = DowncodePrefix(y);
  if (!out.ok()) return out.status();
  return PredicatesFrom(*out);
}

absl::StatusOr<bool> EvaluatePredicate(const Predicate& psi,
                                       std::span<const Scalar> x) {
  if (x.size() != psi.box.size() || psi.hierarchies.size() != psi.box.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("record has ", x.size(), " values, predicate has ",
                     psi.box.size(), " cells"));
  }
  for (size_t d = 0; d < x.size(); ++d) {
    if (!psi.hierarchies[d]->Contains(psi.box[d], x[d])) return false;
  }
  return true;
}

bool StructurallyDisjoint(const Predicate& a, const Predicate& b) {
  for (size_t d = 0; d < a.box.size() && d < b.box.size(); ++d) {
    if (!a.hierarchies[d]->Intersects(a.box[d], b.box[d])) return true;
  }
  return false;
}

WeightEstimate EstimatePredicateWeight(const Predicate& psi,
                                       const RecordDistribution& dist,
                                       uint64_t samples, uint64_t seed) {
  std::mt19937_64 rng(seed);
  WeightEstimate est;
  est.samples = samples;
  for (uint64_t i = 0; i < samples; ++i) {
    const Latent latent = dist.DrawLatent(rng);
    bool hit = true;
    for (size_t d = 0; d < psi.box.size() && hit; ++d) {
      hit = psi.hierarchies[d]->Contains(psi.box[d],
                                         dist.DrawCoordinate(latent, d, rng));
    }
    if (hit) ++est.hits;
  }
  return est;
}

PsoReport PredicateSetReport(const std::vector<Predicate>& psi,
                             const Dataset& x, const RecordDistribution* dist,
                             uint64_t mc_samples, uint64_t seed) {
  PsoReport report;
  for (size_t i = 0; i < psi.size(); ++i) {
    PredicateStats stats;
    stats.label = psi[i].label;
    for (size_t n = 0; n < x.size(); ++n) {
      absl::StatusOr<bool> hit = EvaluatePredicate(psi[i], x.row(n));
      if (hit.ok() && *hit) ++stats.isolation;
    }
    if (dist != nullptr) {
      stats.weight = dist->BoxProbability(psi[i].hierarchies, psi[i].box);
      if (mc_samples > 0) {
        stats.monte_carlo = EstimatePredicateWeight(
            psi[i], *dist, mc_samples, DeriveSeed(seed, i));
      }
    }
    report.predicates.push_back(stats);
  }
  for (size_t i = 0; i < psi.size(); ++i) {
    for (size_t j = i + 1; j < psi.size(); ++j) {
      if (!StructurallyDisjoint(psi[i], psi[j])) report.pairwise_disjoint = false;
    }
  }
  return report;
}

}  // namespace downcode
