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

#include "downcode/generators.h"

#include <cmath>
#include <numbers>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "boost/math/special_functions/erf.hpp"

namespace downcode {
namespace {

double NormalCdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double NormalMass(double lo, double hi, double mu, double sigma) {
  return NormalCdf((hi - mu) / sigma) - NormalCdf((lo - mu) / sigma);
}

absl::Status CheckCounts(size_t k, size_t n, size_t d) {
  if (k < 2) return absl::InvalidArgumentError("k must be >= 2");
  if (n < k) return absl::InvalidArgumentError("N must be >= k");
  if (d < 1) return absl::InvalidArgumentError("D must be >= 1");
  return absl::OkStatus();
}

class ClusteredDistribution : public RecordDistribution {
 public:
  explicit ClusteredDistribution(const ClusteredParams& p) : p_(p) {}

  size_t dims() const override { return p_.d; }

  Latent DrawLatent(std::mt19937_64& rng) const override {
    Latent latent;
    latent.big = std::bernoulli_distribution(p_.p_big)(rng);
    latent.t = std::uniform_int_distribution<size_t>(1, p_.t)(rng);
    return latent;
  }

  Scalar DrawCoordinate(const Latent& latent, size_t,
                        std::mt19937_64& rng) const override {
    std::normal_distribution<double> normal(
        p_.centers[latent.t - 1], latent.big ? p_.sigma_big : p_.sigma_sml);
    const Scalar lo = p_.A(1);
    const Scalar hi = p_.A(p_.t + 1);
    for (;;) {
      const Scalar v = normal(rng);
      if (lo <= v && v <= hi) return v;
    }
  }

  double BoxProbability(const std::vector<HierarchyPtr>& hierarchies,
                        std::span<const Cell> z) const override {
    const double lo = p_.A(1);
    const double hi = p_.A(p_.t + 1);
    double total = 0;
    for (size_t t = 1; t <= p_.t; ++t) {
      for (bool big : {false, true}) {
        const double mu = p_.centers[t - 1];
        const double sigma = big ? p_.sigma_big : p_.sigma_sml;
        const double in_domain = NormalMass(lo, hi, mu, sigma);
        double prob = (big ? p_.p_big : 1 - p_.p_big) / p_.t;
        for (size_t d = 0; d < z.size() && prob > 0; ++d) {
          if (z[d].is_exact()) {
            prob = 0;
            break;
          }
          double mass = 0;
          for (const Interval& i :
               hierarchies[d]->set(z[d].node()).intervals()) {
            mass += NormalMass(std::max(i.lo, lo), std::min(i.hi, hi), mu,
                               sigma);
          }
          prob *= mass / in_domain;
        }
        total += prob;
      }
    }
    return total;
  }

 private:
  ClusteredParams p_;
};

class PrefixDistribution : public RecordDistribution {
 public:
  explicit PrefixDistribution(const PrefixParams& p) : p_(p) {}

  size_t dims() const override { return p_.d; }

  Latent DrawLatent(std::mt19937_64& rng) const override {
    Latent latent;
    latent.t = std::uniform_int_distribution<size_t>(1, p_.t)(rng);
    return latent;
  }

  Scalar DrawCoordinate(const Latent& latent, size_t,
                        std::mt19937_64& rng) const override {
    return std::bernoulli_distribution(p_.p_spike)(rng)
               ? static_cast<Scalar>(latent.t)
               : 0.0;
  }

  double BoxProbability(const std::vector<HierarchyPtr>& hierarchies,
                        std::span<const Cell> z) const override {
    double total = 0;
    for (size_t t = 1; t <= p_.t; ++t) {
      double prob = 1.0 / p_.t;
      for (size_t d = 0; d < z.size() && prob > 0; ++d) {
        const Hierarchy& h = *hierarchies[d];
        const double hit_zero = h.Contains(z[d], 0.0) ? 1 - p_.p_spike : 0;
        const double hit_t =
            h.Contains(z[d], static_cast<Scalar>(t)) ? p_.p_spike : 0;
        prob *= hit_zero + hit_t;
      }
      total += prob;
    }
    return total;
  }

 private:
  PrefixParams p_;
};

template <typename Params>
std::pair<Dataset, SampleProvenance> SampleFrom(const RecordDistribution& dist,
                                                const Params& p,
                                                SampleProvenance::Kind kind,
                                                uint64_t seed) {
  std::mt19937_64 rng(seed);
  Dataset x(p.d);
  SampleProvenance prov;
  prov.kind = kind;
  for (size_t n = 0; n < p.n; ++n) {
    Latent latent;
    const std::vector<Scalar> row = dist.Draw(rng, &latent);
    x.AddRow(row);
    prov.latent.push_back(latent.t);
    if (kind == SampleProvenance::Kind::kClustered) {
      prov.big.push_back(latent.big);
    }
  }
  return {std::move(x), std::move(prov)};
}

}  // namespace

uint64_t DeriveSeed(uint64_t master, uint64_t index) {
  auto mix = [](uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master) ^ index);
}

double Zeta() {
  return 1.0 / (std::numbers::sqrt2 * boost::math::erf_inv(0.5));
}

absl::StatusOr<ClusteredParams> ClusteredParams::Default(size_t k, size_t n,
                                                         size_t d) {
  if (absl::Status s = CheckCounts(k, n, d); !s.ok()) return s;
  ClusteredParams p;
  p.mode = Mode::kDefault;
  p.k = k;
  p.n = n;
  p.d = d;
  p.t = n / k;
  for (size_t t = 1; t <= p.t; ++t) p.centers.push_back(130.0 * t);
  p.outer_half_width = 65.0;
  p.inner_half_width = 6.6;
  p.sigma_sml = 1.0;
  p.sigma_big = 10.0;
  p.p_big = 1.0 / k;
  return p;
}

absl::StatusOr<ClusteredParams> ClusteredParams::Asymptotic(size_t k,
                                                            size_t n,
                                                            size_t d) {
  if (absl::Status s = CheckCounts(k, n, d); !s.ok()) return s;
  if (n < 3) return absl::InvalidArgumentError("asymptotic mode needs N >= 3");
  const double log_n = std::log(static_cast<double>(n));
  ClusteredParams p;
  p.mode = Mode::kAsymptotic;
  p.k = k;
  p.n = n;
  p.d = d;
  p.t = n / k;
  p.sigma_sml = 1.0;
  p.inner_half_width = log_n;
  p.sigma_big = Zeta() * log_n;
  p.outer_half_width = Zeta() * log_n * log_n;
  for (size_t t = 1; t <= p.t; ++t) {
    p.centers.push_back(2.0 * t * p.outer_half_width);
  }
  p.p_big = 1.0 / k;
  if (absl::Status s = p.Validate(); !s.ok()) return s;
  return p;
}

absl::Status ClusteredParams::Validate() const {
  if (absl::Status s = CheckCounts(k, n, d); !s.ok()) return s;
  if (t < 1 || centers.size() != t) {
    return absl::InvalidArgumentError("need one center per cluster");
  }
  if (!(inner_half_width > 0) || !(inner_half_width < outer_half_width)) {
    return absl::InvalidArgumentError(
        "inner half-width must lie in (0, outer half-width)");
  }
  if (!(sigma_sml > 0) || !(sigma_big > 0)) {
    return absl::InvalidArgumentError("standard deviations must be positive");
  }
  if (!(p_big >= 0 && p_big <= 1)) {
    return absl::InvalidArgumentError("p_big must be a probability");
  }
  for (size_t i = 1; i <= t; ++i) {
    if (!(A(i) < B(i) && B(i) < D(i) && D(i) < A(i + 1))) {
      return absl::InvalidArgumentError(
          absl::StrCat("cluster ", i, " overlaps its neighbour"));
    }
  }
  return absl::OkStatus();
}

Scalar ClusteredParams::A(size_t cluster) const {
  if (cluster > t) return centers[t - 1] + outer_half_width;
  return centers[cluster - 1] - outer_half_width;
}

Scalar ClusteredParams::B(size_t cluster) const {
  return centers[cluster - 1] - inner_half_width;
}

Scalar ClusteredParams::D(size_t cluster) const {
  return centers[cluster - 1] + inner_half_width;
}

absl::StatusOr<PrefixParams> PrefixParams::Make(size_t k, size_t n, size_t d,
                                                double alpha) {
  if (absl::Status s = CheckCounts(k, n, d); !s.ok()) return s;
  if (!(alpha > 0 && alpha <= 1)) {
    return absl::InvalidArgumentError("alpha must lie in (0, 1]");
  }
  PrefixParams p;
  p.k = k;
  p.n = n;
  p.d = d;
  p.alpha = alpha;
  const double exact = static_cast<double>(n) * n / alpha;
  p.t = static_cast<size_t>(std::ceil(exact - 1e-9 * exact));
  p.p_spike = 1.0 / (2.0 * k);
  return p;
}

absl::Status PrefixParams::Validate() const {
  if (absl::Status s = CheckCounts(k, n, d); !s.ok()) return s;
  if (t < 1) return absl::InvalidArgumentError("T must be >= 1");
  if (!(p_spike >= 0 && p_spike <= 1)) {
    return absl::InvalidArgumentError("p_spike must be a probability");
  }
  return absl::OkStatus();
}

absl::StatusOr<HierarchyPtr> BuildClusteredHierarchy(const ClusteredParams& p) {
  if (absl::Status s = p.Validate(); !s.ok()) return s;
  absl::StatusOr<AttributeDomain> domain =
      AttributeDomain::RealInterval(p.A(1), p.A(p.t + 1));
  if (!domain.ok()) return domain.status();
  std::vector<NodeSpec> nodes;
  nodes.push_back({"root", std::nullopt,
                   ValueSet::Intervals({{p.A(1), p.A(p.t + 1), false}})});
  for (size_t t = 1; t <= p.t; ++t) {
    const std::string id = absl::StrCat("H", t);
    nodes.push_back({id, "root", ValueSet::Intervals({{p.A(t), p.A(t + 1)}})});
    nodes.push_back({absl::StrCat(id, ".sml"), id,
                     ValueSet::Intervals({{p.B(t), p.D(t)}})});
    nodes.push_back(
        {absl::StrCat(id, ".big"), id,
         ValueSet::Intervals({{p.A(t), p.B(t)}, {p.D(t), p.A(t + 1)}})});
  }
  absl::StatusOr<Hierarchy> h =
      Hierarchy::Create("clustered", *std::move(domain), std::move(nodes));
  if (!h.ok()) return h.status();
  return std::make_shared<const Hierarchy>(*std::move(h));
}

absl::StatusOr<HierarchyPtr> BuildPrefixHierarchy(size_t t) {
  if (t < 1) return absl::InvalidArgumentError("T must be >= 1");
  std::vector<Scalar> values;
  for (size_t v = 0; v <= t; ++v) values.push_back(static_cast<Scalar>(v));
  absl::StatusOr<AttributeDomain> domain = AttributeDomain::Finite(values);
  if (!domain.ok()) return domain.status();

  auto prefix_id = [](size_t top) { return absl::StrCat("[0,", top, "]"); };
  auto spike_id = [](size_t v) { return absl::StrCat("{", v, "}"); };
  std::vector<NodeSpec> nodes;
  nodes.push_back({prefix_id(t), std::nullopt, ValueSet::Finite(values)});
  for (size_t top = t; top >= 1; --top) {
    values.pop_back();
    const std::string parent = prefix_id(top);
    if (top > 1) {
      nodes.push_back({prefix_id(top - 1), parent, ValueSet::Finite(values)});
    } else {
      nodes.push_back({spike_id(0), parent, ValueSet::Finite({0.0})});
    }
    nodes.push_back({spike_id(top), parent,
                     ValueSet::Finite({static_cast<Scalar>(top)})});
  }
  absl::StatusOr<Hierarchy> h =
      Hierarchy::Create("prefix", *std::move(domain), std::move(nodes));
  if (!h.ok()) return h.status();
  return std::make_shared<const Hierarchy>(*std::move(h));
}

std::vector<Scalar> RecordDistribution::Draw(std::mt19937_64& rng,
                                             Latent* latent) const {
  const Latent drawn = DrawLatent(rng);
  std::vector<Scalar> row(dims());
  for (size_t d = 0; d < row.size(); ++d) row[d] = DrawCoordinate(drawn, d, rng);
  if (latent != nullptr) *latent = drawn;
  return row;
}

std::unique_ptr<RecordDistribution> MakeClusteredDistribution(
    const ClusteredParams& p) {
  return std::make_unique<ClusteredDistribution>(p);
}

std::unique_ptr<RecordDistribution> MakePrefixDistribution(
    const PrefixParams& p) {
  return std::make_unique<PrefixDistribution>(p);
}

absl::StatusOr<std::pair<Dataset, SampleProvenance>> SampleClustered(
    const ClusteredParams& p, uint64_t seed) {
  if (absl::Status s = p.Validate(); !s.ok()) return s;
  ClusteredDistribution dist(p);
  return SampleFrom(dist, p, SampleProvenance::Kind::kClustered, seed);
}

absl::StatusOr<std::pair<Dataset, SampleProvenance>> SamplePrefix(
    const PrefixParams& p, uint64_t seed) {
  if (absl::Status s = p.Validate(); !s.ok()) return s;
  PrefixDistribution dist(p);
  return SampleFrom(dist, p, SampleProvenance::Kind::kPrefix, seed);
}

absl::StatusOr<bool> IsCollisionFree(const SampleProvenance& prov) {
  if (prov.kind != SampleProvenance::Kind::kPrefix) {
    return absl::InvalidArgumentError(
        "collision-freeness is defined for prefix samples only");
  }
  absl::flat_hash_set<size_t> seen;
  for (size_t t : prov.latent) {
    if (!seen.insert(t).second) return false;
  }
  return true;
}

absl::StatusOr<std::vector<ClusterInfo>> ClassifyClusters(
    const Dataset& x, const SampleProvenance& prov, const ClusteredParams& p) {
  if (prov.kind != SampleProvenance::Kind::kClustered) {
    return absl::InvalidArgumentError("clustered provenance required");
  }
  if (prov.size() != x.size()) {
    return absl::InvalidArgumentError("provenance and dataset lengths differ");
  }
  if (absl::Status s = p.Validate(); !s.ok()) return s;
  std::vector<ClusterInfo> clusters(p.t);
  for (size_t n = 0; n < x.size(); ++n) {
    if (x.dims() == 0) break;
    // The cluster box the first coordinate falls in is the only candidate.
    const Scalar first = x.at(n, 0);
    size_t t = 0;
    for (size_t c = 1; c <= p.t; ++c) {
      if (p.A(c) <= first && (first < p.A(c + 1) || c == p.t)) {
        t = c;
        break;
      }
    }
    if (t == 0) continue;
    bool inside = true;
    bool big = false;
    for (size_t d = 0; d < x.dims() && inside; ++d) {
      const Scalar v = x.at(n, d);
      inside = p.A(t) <= v && (v < p.A(t + 1) || (t == p.t && v == p.A(t + 1)));
      big = big || !(p.B(t) <= v && v < p.D(t));
    }
    if (!inside) continue;
    ++clusters[t - 1].size;
    if (big) ++clusters[t - 1].big_count;
  }
  for (ClusterInfo& c : clusters) {
    c.x_good = c.size == p.k && c.big_count == 1;
  }
  return clusters;
}

}  // namespace downcode
