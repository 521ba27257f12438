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

#ifndef DOWNCODE_GENERATORS_H_
#define DOWNCODE_GENERATORS_H_

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "downcode/dataset.h"
#include "downcode/hierarchy.h"

namespace downcode {

// Independent 64-bit stream seed for (master, index), via splitmix64.
uint64_t DeriveSeed(uint64_t master, uint64_t index);

// 1 / (sqrt(2) * erfinv(1/2)), the ratio of a normal's standard deviation to
// its median absolute deviation.
double Zeta();

// Mixture of T spherical Gaussian clusters: a record is "big" with
// probability p_big, picks a cluster t uniformly, and draws every coordinate
// from N(c_t, sigma^2).
struct ClusteredParams {
  enum class Mode { kDefault, kAsymptotic };

  Mode mode = Mode::kDefault;
  size_t k = 10;
  size_t n = 1000;
  size_t d = 64;
  size_t t = 100;
  std::vector<Scalar> centers;
  Scalar outer_half_width = 65.0;
  Scalar inner_half_width = 6.6;
  Scalar sigma_sml = 1.0;
  Scalar sigma_big = 10.0;
  double p_big = 0.1;

  // c_t = 130 t, outer 65, inner 6.6, sigma 1 and 10.
  static absl::StatusOr<ClusteredParams> Default(size_t k, size_t n, size_t d);
  // Widths scaling with log N: inner log N, sigma_big zeta log N,
  // outer zeta log^2 N, c_t = 2 t outer.
  static absl::StatusOr<ClusteredParams> Asymptotic(size_t k, size_t n,
                                                    size_t d);

  absl::Status Validate() const;

  // Interval endpoints for cluster t in [1, T]; A(T + 1) closes the range.
  Scalar A(size_t cluster) const;
  Scalar B(size_t cluster) const;
  Scalar D(size_t cluster) const;
};

// Spike construction: a record draws t uniformly from [1, T] and sets each
// coordinate to t with probability p_spike, else 0.
struct PrefixParams {
  size_t k = 2;
  size_t n = 8;
  size_t d = 64;
  double alpha = 0.1;
  size_t t = 640;
  double p_spike = 0.25;

  // T = ceil(N^2 / alpha), p_spike = 1 / (2k).
  static absl::StatusOr<PrefixParams> Make(size_t k, size_t n, size_t d,
                                           double alpha);
  absl::Status Validate() const;
};

absl::StatusOr<HierarchyPtr> BuildClusteredHierarchy(const ClusteredParams& p);
absl::StatusOr<HierarchyPtr> BuildPrefixHierarchy(size_t t);

// Latent ground truth behind a sample. Never handed to an adversary.
struct SampleProvenance {
  enum class Kind { kClustered, kPrefix };

  Kind kind = Kind::kClustered;
  // Cluster index or spike value per row, 1-based.
  std::vector<size_t> latent;
  // Clustered only.
  std::vector<bool> big;

  size_t size() const { return latent.size(); }
};

struct Latent {
  size_t t = 1;
  bool big = false;
};

// A product distribution given a latent variable, sampled lazily so that
// membership tests can stop at the first failing coordinate.
class RecordDistribution {
 public:
  virtual ~RecordDistribution() = default;

  virtual size_t dims() const = 0;
  virtual Latent DrawLatent(std::mt19937_64& rng) const = 0;
  virtual Scalar DrawCoordinate(const Latent& latent, size_t d,
                                std::mt19937_64& rng) const = 0;
  // Exact probability that a fresh record lies in the box `z`.
  virtual double BoxProbability(const std::vector<HierarchyPtr>& hierarchies,
                                std::span<const Cell> z) const = 0;

  // One full record.
  std::vector<Scalar> Draw(std::mt19937_64& rng, Latent* latent) const;
};

std::unique_ptr<RecordDistribution> MakeClusteredDistribution(
    const ClusteredParams& p);
std::unique_ptr<RecordDistribution> MakePrefixDistribution(
    const PrefixParams& p);

absl::StatusOr<std::pair<Dataset, SampleProvenance>> SampleClustered(
    const ClusteredParams& p, uint64_t seed);
absl::StatusOr<std::pair<Dataset, SampleProvenance>> SamplePrefix(
    const PrefixParams& p, uint64_t seed);

// All spike values distinct.
absl::StatusOr<bool> IsCollisionFree(const SampleProvenance& prov);

struct ClusterInfo {
  size_t size = 0;
  size_t big_count = 0;
  bool x_good = false;
};

// Per cluster (index t - 1): rows inside H_t^D, how many of them have a
// coordinate in a big region, and whether the cluster is X-good.
absl::StatusOr<std::vector<ClusterInfo>> ClassifyClusters(
    const Dataset& x, const SampleProvenance& prov, const ClusteredParams& p);

}  // namespace downcode

#endif  // DOWNCODE_GENERATORS_H_
