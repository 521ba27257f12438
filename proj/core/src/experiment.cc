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

#include "downcode/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>
#include <utility>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"
#include "string_compat.h"

namespace downcode {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// Sub-stream indices under a trial seed.
constexpr uint64_t kSamplerStream = 0;
constexpr uint64_t kAnonymizerStream = 1;
constexpr uint64_t kMonteCarloStream = 2;

absl::Status CheckKeys(const Json& obj, std::string_view where,
                       std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) {
    return absl::InvalidArgumentError(absl::StrCat(internal::Sv(where), " must be an object"));
  }
  for (const auto& [key, unused] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown key '", key, "' in ", internal::Sv(where)));
    }
  }
  return absl::OkStatus();
}

template <typename T>
absl::Status Read(const Json& obj, std::string_view key, T* out) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) return absl::OkStatus();
  try {
    *out = it->get<T>();
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad value for '", internal::Sv(key), "': ", e.what()));
  }
  return absl::OkStatus();
}

absl::Status ReadGate(const Json& obj, std::string_view key,
                      std::optional<double>* out) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) return absl::OkStatus();
  if (!it->is_number()) {
    return absl::InvalidArgumentError(
        absl::StrCat("gate '", internal::Sv(key), "' must be a number"));
  }
  *out = it->get<double>();
  return absl::OkStatus();
}

#define DC_RETURN_IF_ERROR(expr)            \
  do {                                      \
    if (absl::Status _s = (expr); !_s.ok()) \
      return _s;                            \
  } while (0)

absl::Status ParseDistribution(const Json& dist, ExperimentConfig* cfg) {
  DC_RETURN_IF_ERROR(CheckKeys(dist, "distribution",
                               {"kind", "mode", "k", "n", "d", "alpha",
                                "p_big", "p_spike"}));
  std::string kind = UsesClustered(cfg->theorem) ? "clustered" : "prefix";
  std::string declared = kind;
  DC_RETURN_IF_ERROR(Read(dist, "kind", &declared));
  if (declared != kind) {
    return absl::InvalidArgumentError(
        absl::StrCat(internal::Sv(TheoremName(cfg->theorem)), " needs a ", kind,
                     " distribution, got ", declared));
  }
  size_t k = cfg->anonymizer.k;
  size_t n = 0;
  size_t d = 0;
  DC_RETURN_IF_ERROR(Read(dist, "k", &k));
  DC_RETURN_IF_ERROR(Read(dist, "n", &n));
  DC_RETURN_IF_ERROR(Read(dist, "d", &d));
  if (k != cfg->anonymizer.k) {
    return absl::InvalidArgumentError(
        "distribution k differs from anonymizer k");
  }
  if (kind == "clustered") {
    std::string mode = "default";
    DC_RETURN_IF_ERROR(Read(dist, "mode", &mode));
    absl::StatusOr<ClusteredParams> p;
    if (mode == "default") {
      p = ClusteredParams::Default(k, n, d);
    } else if (mode == "asymptotic") {
      p = ClusteredParams::Asymptotic(k, n, d);
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown clustered mode '", mode, "'"));
    }
    if (!p.ok()) return p.status();
    DC_RETURN_IF_ERROR(Read(dist, "p_big", &p->p_big));
    cfg->clustered = *std::move(p);
  } else {
    double alpha = 0.1;
    DC_RETURN_IF_ERROR(Read(dist, "alpha", &alpha));
    absl::StatusOr<PrefixParams> p = PrefixParams::Make(k, n, d, alpha);
    if (!p.ok()) return p.status();
    DC_RETURN_IF_ERROR(Read(dist, "p_spike", &p->p_spike));
    cfg->prefix = *p;
  }
  return absl::OkStatus();
}

size_t ConfigRows(const ExperimentConfig& cfg) {
  return UsesClustered(cfg.theorem) ? cfg.clustered.n : cfg.prefix.n;
}

size_t ConfigDims(const ExperimentConfig& cfg) {
  return UsesClustered(cfg.theorem) ? cfg.clustered.d : cfg.prefix.d;
}

bool IsPsoTheorem(Theorem t) {
  return t == Theorem::kThm3 || t == Theorem::kThm4;
}

// One trial's data and published dataset.
struct TrialInputs {
  Dataset x;
  SampleProvenance prov;
  GeneralizedDataset y;
};

absl::StatusOr<HierarchyPtr> BuildHierarchy(const ExperimentConfig& cfg) {
  return UsesClustered(cfg.theorem) ? BuildClusteredHierarchy(cfg.clustered)
                                    : BuildPrefixHierarchy(cfg.prefix.t);
}

absl::StatusOr<TrialInputs> PrepareTrial(const ExperimentConfig& cfg,
                                         const HierarchyPtr& h,
                                         uint64_t seed) {
  TrialInputs in;
  const uint64_t sampler_seed = DeriveSeed(seed, kSamplerStream);
  if (UsesClustered(cfg.theorem)) {
    auto sample = SampleClustered(cfg.clustered, sampler_seed);
    if (!sample.ok()) return sample.status();
    in.x = std::move(sample->first);
    in.prov = std::move(sample->second);
  } else {
    auto sample = SamplePrefix(cfg.prefix, sampler_seed);
    if (!sample.ok()) return sample.status();
    in.x = std::move(sample->first);
    in.prov = std::move(sample->second);
  }
  std::vector<HierarchyPtr> hierarchies(in.x.dims(), h);
  AnonymizerConfig anon = cfg.anonymizer;
  anon.seed = DeriveSeed(DeriveSeed(seed, kAnonymizerStream),
                         cfg.anonymizer.seed);
  absl::StatusOr<GeneralizedDataset> y =
      Anonymize(in.x, std::move(hierarchies), anon);
  if (!y.ok()) return y.status();
  in.y = *std::move(y);
  return in;
}

// Indices of predicates whose weight gets sampled.
std::vector<size_t> SpotCheckIndices(size_t count, size_t spot,
                                     uint64_t seed) {
  std::vector<size_t> idx(count);
  for (size_t i = 0; i < count; ++i) idx[i] = i;
  if (spot == 0 || spot >= count) return idx;
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(spot);
  std::sort(idx.begin(), idx.end());
  return idx;
}

void ScorePredicates(const ExperimentConfig& cfg,
                     const std::vector<Predicate>& psi, const Dataset& x,
                     uint64_t seed, TrialRecord* rec) {
  std::unique_ptr<RecordDistribution> dist =
      UsesClustered(cfg.theorem) ? MakeClusteredDistribution(cfg.clustered)
                                 : MakePrefixDistribution(cfg.prefix);
  const uint64_t mc_seed = DeriveSeed(seed, kMonteCarloStream);
  rec->pso = PredicateSetReport(psi, x, dist.get(), 0, mc_seed);
  if (cfg.mc_samples > 0) {
    for (size_t i : SpotCheckIndices(psi.size(), cfg.mc_spot_checks,
                                     DeriveSeed(mc_seed, psi.size()))) {
      rec->pso.predicates[i].monte_carlo = EstimatePredicateWeight(
          psi[i], *dist, cfg.mc_samples, DeriveSeed(mc_seed, i));
    }
  }
  bool ok = rec->pso.pairwise_disjoint && psi.size() >= cfg.min_predicates;
  for (const PredicateStats& s : rec->pso.predicates) {
    ok = ok && s.isolation == 1;
    if (s.monte_carlo.has_value() && s.monte_carlo->samples > 0) {
      const double w = static_cast<double>(s.monte_carlo->hits) /
                       static_cast<double>(s.monte_carlo->samples);
      ok = ok && w <= cfg.weight_threshold;
    }
  }
  rec->pso_success = ok;
}

absl::Status RunTrialInto(const ExperimentConfig& cfg, const HierarchyPtr& h,
                          TrialRecord* rec) {
  absl::StatusOr<TrialInputs> in = PrepareTrial(cfg, h, rec->seed);
  if (!in.ok()) return in.status();
  const size_t k = cfg.anonymizer.k;
  const bool clustered = UsesClustered(cfg.theorem);

  if (!clustered) {
    absl::StatusOr<bool> cf = IsCollisionFree(in->prov);
    if (!cf.ok()) return cf.status();
    rec->collision_free = *cf;
  }

  absl::StatusOr<DowncodeOutput> out =
      clustered ? DowncodeClustered(in->y, k, cfg.clustered)
                : DowncodePrefix(in->y);
  if (!out.ok()) return out.status();
  rec->downcoded = out->downcoded();
  rec->audit = out->audit;
  for (const ClusterAudit& a : out->audit) {
    if (!clustered && a.action == ClusterAction::kDowncoded) {
      rec->spike_dims.push_back(a.coarse_dims);
    }
  }

  absl::StatusOr<DatasetRefinementReport> refines =
      DatasetRefines(out->z, in->y);
  if (!refines.ok()) return refines.status();
  rec->refinement = *refines;
  absl::StatusOr<bool> valid = GeneralizesWithinClasses(out->z, in->x, in->y);
  if (!valid.ok()) return valid.status();
  rec->valid = *valid;
  rec->success = rec->valid && rec->refinement.holds &&
                 rec->refinement.delta_n >= std::max<size_t>(cfg.delta_n, 1) &&
                 rec->refinement.min_delta_d >= cfg.delta_d;

  absl::StatusOr<StructureReport> structure = VerifyStructure(
      in->y, in->x,
      clustered ? StructureMode::kClaim1 : StructureMode::kClaim2, k);
  if (!structure.ok()) return structure.status();
  rec->structure = *structure;

  std::vector<Predicate> psi;
  if (IsPsoTheorem(cfg.theorem)) {
    absl::StatusOr<std::vector<Predicate>> emitted =
        clustered ? PsoClustered(in->y, k, cfg.clustered) : PsoPrefix(in->y);
    if (!emitted.ok()) return emitted.status();
    psi = *std::move(emitted);
  } else {
    psi = PredicatesFrom(*out);
  }
  ScorePredicates(cfg, psi, in->x, rec->seed, rec);
  return absl::OkStatus();
}

absl::StatusOr<std::vector<TrialRecord>> RunTrials(
    const ExperimentConfig& cfg, const RunOptions& options) {
  absl::StatusOr<HierarchyPtr> h = BuildHierarchy(cfg);
  if (!h.ok()) return h.status();
  std::vector<TrialRecord> records(cfg.trials);
  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (size_t i = next++; i < records.size(); i = next++) {
      TrialRecord& rec = records[i];
      rec.index = i;
      rec.seed = DeriveSeed(cfg.master_seed, i);
      if (absl::Status s = RunTrialInto(cfg, *h, &rec); !s.ok()) {
        rec.error = s.ToString();
      }
    }
  };
  const size_t workers =
      std::clamp<size_t>(options.workers, 1, std::max<size_t>(cfg.trials, 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  return records;
}

ExperimentReport Fold(const ExperimentConfig& cfg,
                      std::vector<TrialRecord> records) {
  ExperimentReport r;
  r.config = cfg;
  r.trials = std::move(records);
  const double claim3_floor =
      static_cast<double>(ConfigDims(cfg)) /
      (4.0 * static_cast<double>(cfg.anonymizer.k) * std::numbers::e);

  size_t success = 0, valid = 0, cf = 0, cf_success = 0, downcoded = 0;
  size_t isolated = 0, disjoint = 0, pso_ok = 0;
  size_t claim3_hits = 0, claim3_total = 0;
  size_t claim2_cells = 0, claim2_ok = 0;
  for (const TrialRecord& t : r.trials) {
    if (!t.ok()) {
      ++r.errors;
      continue;
    }
    success += t.success;
    valid += t.valid;
    downcoded += t.downcoded;
    if (t.collision_free.value_or(false)) {
      ++cf;
      cf_success += t.success;
      claim2_cells += t.structure.cells;
      claim2_ok += t.structure.conforming;
      for (size_t dims : t.spike_dims) {
        ++claim3_total;
        claim3_hits += static_cast<double>(dims) >= claim3_floor;
      }
    }
    r.claim1_max_nonconfined =
        std::max(r.claim1_max_nonconfined, t.structure.nonconfined);
    ++r.psi_histogram[t.pso.size()];
    r.predicates += t.pso.size();
    disjoint += t.pso.pairwise_disjoint;
    pso_ok += t.pso_success;
    for (const PredicateStats& s : t.pso.predicates) {
      isolated += s.isolation == 1;
      if (s.monte_carlo.has_value() && s.monte_carlo->samples > 0) {
        ++r.mc_checks;
        r.mc_hits += s.monte_carlo->hits;
        const double est = static_cast<double>(s.monte_carlo->hits) /
                           static_cast<double>(s.monte_carlo->samples);
        r.mc_max_abs_error =
            std::max(r.mc_max_abs_error, std::abs(est - s.weight));
      }
    }
  }
  const size_t n = r.trials.size();
  r.daleth = WilsonInterval(success, n);
  r.valid = WilsonInterval(valid, n);
  r.mean_downcoded = n == 0 ? 0 : static_cast<double>(downcoded) / n;
  r.isolation = WilsonInterval(isolated, r.predicates);
  r.pairwise_disjoint = WilsonInterval(disjoint, n);
  r.pso_success = WilsonInterval(pso_ok, n);
  r.claim3 = WilsonInterval(claim3_hits, claim3_total);
  if (!UsesClustered(cfg.theorem)) {
    r.collision_free = WilsonInterval(cf, n);
    r.collision_free_success = WilsonInterval(cf_success, cf);
    r.claim2_conformity =
        claim2_cells == 0 ? 1.0 : static_cast<double>(claim2_ok) / claim2_cells;
  }
  return r;
}

OrderedJson ProportionJson(const Proportion& p) {
  OrderedJson j;
  j["hits"] = p.hits;
  j["total"] = p.total;
  j["rate"] = p.rate;
  j["ci95"] = {p.lo, p.hi};
  return j;
}

OrderedJson ConfigJson(const ExperimentConfig& cfg) {
  OrderedJson j;
  j["name"] = cfg.name;
  j["theorem"] = TheoremName(cfg.theorem);
  OrderedJson dist;
  if (UsesClustered(cfg.theorem)) {
    const ClusteredParams& p = cfg.clustered;
    dist["kind"] = "clustered";
    dist["mode"] =
        p.mode == ClusteredParams::Mode::kDefault ? "default" : "asymptotic";
    dist["k"] = p.k;
    dist["n"] = p.n;
    dist["d"] = p.d;
    dist["t"] = p.t;
    dist["p_big"] = p.p_big;
  } else {
    const PrefixParams& p = cfg.prefix;
    dist["kind"] = "prefix";
    dist["k"] = p.k;
    dist["n"] = p.n;
    dist["d"] = p.d;
    dist["alpha"] = p.alpha;
    dist["t"] = p.t;
    dist["p_spike"] = p.p_spike;
  }
  j["distribution"] = dist;
  j["anonymizer"] = {{"k", cfg.anonymizer.k},
                     {"strategy", StrategyName(cfg.anonymizer.strategy)},
                     {"seed", cfg.anonymizer.seed}};
  j["trials"] = cfg.trials;
  j["thresholds"] = {{"delta_n", cfg.delta_n}, {"delta_d", cfg.delta_d}};
  j["mc_samples"] = cfg.mc_samples;
  j["mc_spot_checks"] = cfg.mc_spot_checks;
  j["weight_threshold"] = cfg.weight_threshold;
  j["min_predicates"] = cfg.min_predicates;
  j["master_seed"] = cfg.master_seed;
  return j;
}

OrderedJson TrialJson(const TrialRecord& t) {
  OrderedJson j;
  j["index"] = t.index;
  j["seed"] = t.seed;
  if (!t.ok()) {
    j["error"] = t.error;
    return j;
  }
  if (t.collision_free.has_value()) j["collision_free"] = *t.collision_free;
  j["downcoded"] = t.downcoded;
  j["refinement"] = {{"holds", t.refinement.holds},
                     {"delta_n", t.refinement.delta_n},
                     {"min_delta_d", t.refinement.min_delta_d}};
  j["valid"] = t.valid;
  j["success"] = t.success;
  OrderedJson audit = OrderedJson::array();
  for (const ClusterAudit& a : t.audit) {
    OrderedJson e;
    e["t"] = a.t;
    e["action"] = ClusterActionName(a.action);
    e["rows"] = a.rows;
    e["coarse_dims"] = a.coarse_dims;
    if (a.target_row.has_value()) e["target_row"] = *a.target_row;
    audit.push_back(std::move(e));
  }
  j["audit"] = std::move(audit);
  j["structure"] = {{"cells", t.structure.cells},
                    {"conforming", t.structure.conforming},
                    {"size_k_clusters", t.structure.size_k_clusters},
                    {"nonconfined", t.structure.nonconfined}};
  OrderedJson preds = OrderedJson::array();
  for (const PredicateStats& s : t.pso.predicates) {
    OrderedJson p;
    p["label"] = s.label;
    p["isolation"] = s.isolation;
    p["weight"] = s.weight;
    if (s.monte_carlo.has_value()) {
      p["mc_hits"] = s.monte_carlo->hits;
      p["mc_samples"] = s.monte_carlo->samples;
    }
    preds.push_back(std::move(p));
  }
  j["pso"] = {{"size", t.pso.size()},
              {"pairwise_disjoint", t.pso.pairwise_disjoint},
              {"success", t.pso_success},
              {"predicates", std::move(preds)}};
  return j;
}

}  // namespace

absl::StatusOr<Theorem> ParseTheorem(std::string_view name) {
  if (name == "thm1") return Theorem::kThm1;
  if (name == "thm2") return Theorem::kThm2;
  if (name == "thm3") return Theorem::kThm3;
  if (name == "thm4") return Theorem::kThm4;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown theorem '", internal::Sv(name), "'"));
}

std::string_view TheoremName(Theorem theorem) {
  switch (theorem) {
    case Theorem::kThm1:
      return "thm1";
    case Theorem::kThm2:
      return "thm2";
    case Theorem::kThm3:
      return "thm3";
    case Theorem::kThm4:
      return "thm4";
  }
  return "?";
}

bool UsesClustered(Theorem theorem) {
  return theorem == Theorem::kThm1 || theorem == Theorem::kThm3;
}

absl::Status ExperimentConfig::Validate() const {
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  if (anonymizer.k < 2) return absl::InvalidArgumentError("k must be >= 2");
  if (UsesClustered(theorem)) {
    DC_RETURN_IF_ERROR(clustered.Validate());
    if (clustered.k != anonymizer.k) {
      return absl::InvalidArgumentError("distribution k differs from anonymizer k");
    }
  } else {
    DC_RETURN_IF_ERROR(prefix.Validate());
    if (prefix.k != anonymizer.k) {
      return absl::InvalidArgumentError("distribution k differs from anonymizer k");
    }
  }
  if (delta_n > ConfigRows(*this)) {
    return absl::InvalidArgumentError("delta_n exceeds N");
  }
  if (delta_d > ConfigDims(*this)) {
    return absl::InvalidArgumentError("delta_d exceeds D");
  }
  if (!(weight_threshold >= 0 && weight_threshold <= 1)) {
    return absl::InvalidArgumentError("weight_threshold must lie in [0, 1]");
  }
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(std::string_view text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) return absl::InvalidArgumentError("malformed JSON");
  DC_RETURN_IF_ERROR(CheckKeys(
      j, "config",
      {"schema", "name", "theorem", "distribution", "anonymizer", "trials",
       "thresholds", "mc_samples", "mc_spot_checks", "weight_threshold",
       "min_predicates", "master_seed", "acceptance"}));
  ExperimentConfig cfg;
  std::string schema(kReportSchema);
  DC_RETURN_IF_ERROR(Read(j, "schema", &schema));
  if (schema != kReportSchema) {
    return absl::InvalidArgumentError(
        absl::StrCat("unsupported schema '", schema, "'"));
  }
  DC_RETURN_IF_ERROR(Read(j, "name", &cfg.name));
  std::string theorem;
  DC_RETURN_IF_ERROR(Read(j, "theorem", &theorem));
  absl::StatusOr<Theorem> t = ParseTheorem(theorem);
  if (!t.ok()) return t.status();
  cfg.theorem = *t;

  if (auto it = j.find("anonymizer"); it != j.end()) {
    DC_RETURN_IF_ERROR(CheckKeys(*it, "anonymizer", {"k", "strategy", "seed"}));
    DC_RETURN_IF_ERROR(Read(*it, "k", &cfg.anonymizer.k));
    DC_RETURN_IF_ERROR(Read(*it, "seed", &cfg.anonymizer.seed));
    std::string strategy = "top";
    DC_RETURN_IF_ERROR(Read(*it, "strategy", &strategy));
    absl::StatusOr<Strategy> s = ParseStrategy(strategy);
    if (!s.ok()) return s.status();
    cfg.anonymizer.strategy = *s;
  }
  auto dist = j.find("distribution");
  if (dist == j.end()) {
    return absl::InvalidArgumentError("missing 'distribution'");
  }
  DC_RETURN_IF_ERROR(ParseDistribution(*dist, &cfg));

  int64_t trials = 1;
  DC_RETURN_IF_ERROR(Read(j, "trials", &trials));
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  cfg.trials = static_cast<size_t>(trials);
  if (auto it = j.find("thresholds"); it != j.end()) {
    DC_RETURN_IF_ERROR(CheckKeys(*it, "thresholds", {"delta_n", "delta_d"}));
    DC_RETURN_IF_ERROR(Read(*it, "delta_n", &cfg.delta_n));
    DC_RETURN_IF_ERROR(Read(*it, "delta_d", &cfg.delta_d));
  }
  DC_RETURN_IF_ERROR(Read(j, "mc_samples", &cfg.mc_samples));
  DC_RETURN_IF_ERROR(Read(j, "mc_spot_checks", &cfg.mc_spot_checks));
  DC_RETURN_IF_ERROR(Read(j, "weight_threshold", &cfg.weight_threshold));
  DC_RETURN_IF_ERROR(Read(j, "min_predicates", &cfg.min_predicates));
  DC_RETURN_IF_ERROR(Read(j, "master_seed", &cfg.master_seed));
  if (auto it = j.find("acceptance"); it != j.end()) {
    AcceptanceGates& g = cfg.acceptance;
    DC_RETURN_IF_ERROR(CheckKeys(
        *it, "acceptance",
        {"min_daleth", "min_collision_free_success", "min_mean_downcoded",
         "min_valid_rate", "min_isolation_rate", "min_pso_success",
         "min_disjoint_rate"}));
    DC_RETURN_IF_ERROR(ReadGate(*it, "min_daleth", &g.min_daleth));
    DC_RETURN_IF_ERROR(ReadGate(*it, "min_collision_free_success",
                                &g.min_collision_free_success));
    DC_RETURN_IF_ERROR(
        ReadGate(*it, "min_mean_downcoded", &g.min_mean_downcoded));
    DC_RETURN_IF_ERROR(ReadGate(*it, "min_valid_rate", &g.min_valid_rate));
    DC_RETURN_IF_ERROR(
        ReadGate(*it, "min_isolation_rate", &g.min_isolation_rate));
    DC_RETURN_IF_ERROR(ReadGate(*it, "min_pso_success", &g.min_pso_success));
    DC_RETURN_IF_ERROR(
        ReadGate(*it, "min_disjoint_rate", &g.min_disjoint_rate));
  }
  DC_RETURN_IF_ERROR(cfg.Validate());
  return cfg;
}

absl::StatusOr<StructureReport> VerifyStructure(const GeneralizedDataset& y,
                                                const Dataset& x,
                                                StructureMode mode, size_t k) {
  if (y.size() != x.size() || y.dims() != x.dims()) {
    return absl::InvalidArgumentError("X and Y shapes differ");
  }
  StructureReport report;
  if (y.dims() == 0 || y.size() == 0) return report;

  if (mode == StructureMode::kClaim2) {
    for (size_t d = 0; d < y.dims(); ++d) {
      const Hierarchy& h = y.hierarchy(d);
      if (h.domain().kind() != AttributeDomain::Kind::kFinite ||
          h.domain().values().front() != 0) {
        return absl::InvalidArgumentError(
            absl::StrCat("dimension ", d, " is not a prefix hierarchy"));
      }
    }
    for (const std::vector<size_t>& cls :
         EquivalenceClasses(y, QuasiIdentifier::All(y.dims()))) {
      for (size_t d = 0; d < y.dims(); ++d) {
        Scalar hi = 0;
        for (size_t n : cls) hi = std::max(hi, x.at(n, d));
        const Scalar ends[2] = {0, hi};
        absl::StatusOr<Cell> prefix = LeastCommonNode(y.hierarchy(d), ends);
        if (!prefix.ok()) return prefix.status();
        const Cell cell = y.at(cls.front(), d);
        report.cells += cls.size();
        if (cell == *prefix || cell == Cell::Exact(hi)) {
          report.conforming += cls.size();
        }
      }
    }
    return report;
  }

  // Cluster of each row: position among the root's children, shared by
  // every coordinate.
  const size_t clusters = y.hierarchy(0).children(y.hierarchy(0).root()).size();
  for (size_t d = 0; d < y.dims(); ++d) {
    const Hierarchy& h = y.hierarchy(d);
    if (h.domain().kind() != AttributeDomain::Kind::kRealInterval ||
        h.children(h.root()).size() != clusters) {
      return absl::InvalidArgumentError(
          absl::StrCat("dimension ", d, " is not a clustered hierarchy"));
    }
  }
  auto position = [&](size_t d, Scalar v) -> std::optional<size_t> {
    const Hierarchy& h = y.hierarchy(d);
    std::optional<NodeIndex> c = h.ChildContaining(h.root(), v);
    if (!c.has_value()) return std::nullopt;
    const std::vector<NodeIndex>& kids = h.children(h.root());
    return static_cast<size_t>(std::find(kids.begin(), kids.end(), *c) -
                               kids.begin());
  };
  absl::flat_hash_map<size_t, std::vector<size_t>> members;
  for (size_t n = 0; n < x.size(); ++n) {
    std::optional<size_t> pos = position(0, x.at(n, 0));
    for (size_t d = 1; d < x.dims() && pos.has_value(); ++d) {
      if (position(d, x.at(n, d)) != pos) pos.reset();
    }
    if (pos.has_value()) members[*pos].push_back(n);
  }
  for (const auto& [pos, rows] : members) {
    if (rows.size() != k) continue;
    ++report.size_k_clusters;
    bool confined = true;
    for (size_t n : rows) {
      for (size_t d = 0; d < y.dims() && confined; ++d) {
        const Hierarchy& h = y.hierarchy(d);
        const Cell box = Cell::Node(h.children(h.root())[pos]);
        confined = h.IsSubset(y.at(n, d), box);
      }
    }
    if (!confined) ++report.nonconfined;
  }
  return report;
}

Proportion WilsonInterval(size_t hits, size_t total) {
  Proportion p;
  p.hits = hits;
  p.total = total;
  if (total == 0) {
    p.hi = 1;
    return p;
  }
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(total);
  const double phat = static_cast<double>(hits) / n;
  const double denom = 1 + z * z / n;
  const double center = (phat + z * z / (2 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom;
  p.rate = phat;
  p.lo = std::max(0.0, center - half);
  p.hi = std::min(1.0, center + half);
  return p;
}

absl::StatusOr<ExperimentReport> RunDowncodingExperiment(
    const ExperimentConfig& config, const RunOptions& options) {
  DC_RETURN_IF_ERROR(config.Validate());
  if (IsPsoTheorem(config.theorem)) {
    return absl::InvalidArgumentError("downcoding runs take thm1 or thm2");
  }
  absl::StatusOr<std::vector<TrialRecord>> records = RunTrials(config, options);
  if (!records.ok()) return records.status();
  return Fold(config, *std::move(records));
}

absl::StatusOr<ExperimentReport> RunPsoExperiment(
    const ExperimentConfig& config, const RunOptions& options) {
  DC_RETURN_IF_ERROR(config.Validate());
  if (!IsPsoTheorem(config.theorem)) {
    return absl::InvalidArgumentError("predicate runs take thm3 or thm4");
  }
  absl::StatusOr<std::vector<TrialRecord>> records = RunTrials(config, options);
  if (!records.ok()) return records.status();
  return Fold(config, *std::move(records));
}

absl::StatusOr<ExperimentReport> RunExperiment(const ExperimentConfig& config,
                                               const RunOptions& options) {
  return IsPsoTheorem(config.theorem)
             ? RunPsoExperiment(config, options)
             : RunDowncodingExperiment(config, options);
}

std::vector<GateResult> EvaluateGates(const ExperimentReport& report) {
  std::vector<GateResult> out;
  auto gate = [&](std::string_view name, const std::optional<double>& min,
                  double value) {
    if (!min.has_value()) return;
    out.push_back({std::string(name), value, *min, value >= *min});
  };
  const AcceptanceGates& g = report.config.acceptance;
  gate("daleth", g.min_daleth, report.daleth.rate);
  gate("collision_free_success", g.min_collision_free_success,
       report.collision_free_success.rate);
  gate("mean_downcoded", g.min_mean_downcoded, report.mean_downcoded);
  gate("valid_rate", g.min_valid_rate, report.valid.rate);
  gate("isolation_rate", g.min_isolation_rate,
       report.predicates == 0 ? 0.0 : report.isolation.rate);
  gate("pso_success", g.min_pso_success, report.pso_success.rate);
  gate("disjoint_rate", g.min_disjoint_rate, report.pairwise_disjoint.rate);
  return out;
}

std::string ReportToJson(const ExperimentReport& report) {
  OrderedJson j;
  j["schema"] = kReportSchema;
  j["config"] = ConfigJson(report.config);
  OrderedJson agg;
  agg["daleth"] = ProportionJson(report.daleth);
  if (!UsesClustered(report.config.theorem)) {
    agg["collision_free"] = ProportionJson(report.collision_free);
    agg["collision_free_success"] =
        ProportionJson(report.collision_free_success);
    agg["claim2_conformity"] = report.claim2_conformity;
    agg["claim3"] = ProportionJson(report.claim3);
  } else {
    agg["claim1_max_nonconfined"] = report.claim1_max_nonconfined;
  }
  agg["valid"] = ProportionJson(report.valid);
  agg["mean_downcoded"] = report.mean_downcoded;
  agg["errors"] = report.errors;
  agg["predicates"] = report.predicates;
  agg["isolation"] = ProportionJson(report.isolation);
  agg["pairwise_disjoint"] = ProportionJson(report.pairwise_disjoint);
  agg["pso_success"] = ProportionJson(report.pso_success);
  OrderedJson hist = OrderedJson::object();
  for (const auto& [size, count] : report.psi_histogram) {
    hist[std::to_string(size)] = count;
  }
  agg["psi_histogram"] = std::move(hist);
  agg["mc_checks"] = report.mc_checks;
  agg["mc_hits"] = report.mc_hits;
  agg["mc_max_abs_error"] = report.mc_max_abs_error;
  j["aggregate"] = std::move(agg);
  OrderedJson gates = OrderedJson::array();
  for (const GateResult& g : EvaluateGates(report)) {
    gates.push_back({{"name", g.name},
                     {"value", g.value},
                     {"threshold", g.threshold},
                     {"pass", g.pass}});
  }
  j["acceptance"] = std::move(gates);
  OrderedJson trials = OrderedJson::array();
  for (const TrialRecord& t : report.trials) trials.push_back(TrialJson(t));
  j["trials"] = std::move(trials);
  return j.dump(2);
}

}  // namespace downcode
