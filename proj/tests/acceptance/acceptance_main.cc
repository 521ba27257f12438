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


// Acceptance runner: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "downcode/anonymizer.h"
#include "downcode/attacks.h"
#include "downcode/audit.h"
#include "downcode/experiment.h"
#include "downcode/generators.h"
#include "downcode/io.h"
#include "downcode/minimality.h"
#include "downcode/refinement.h"
#include "test_util.h"

namespace downcode {
namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
};

class Stopwatch {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

void Info(const std::string& line) { std::printf("  %s\n", line.c_str()); }

std::string Rate(const Proportion& p) {
  return absl::StrFormat("%zu/%zu = %.4f [%.4f, %.4f]", p.hits, p.total,
                         p.rate, p.lo, p.hi);
}

class Runner {
 public:
  Runner(std::string configs, std::string artifacts, size_t workers)
      : configs_(std::move(configs)),
        artifacts_(std::move(artifacts)),
        workers_(workers) {}

  Outcome Run(int criterion) {
    switch (criterion) {
      case 1: return Criterion1();
      case 2: return Criterion2();
      case 3: return Criterion3();
      case 4: return Criterion4();
      case 5: return Criterion5();
      case 6: return Criterion6();
      case 7: return Criterion7();
      case 8: return Criterion8();
    }
    return {false, "unknown criterion"};
  }

 private:
  ExperimentConfig Load(const std::string& name) {
    const std::string path = absl::StrCat(configs_, "/", name);
    return test::Unwrap(
        ParseExperimentConfig(test::Unwrap(ReadFile(path))));
  }

  ExperimentReport Campaign(const ExperimentConfig& cfg, double* seconds) {
    Stopwatch clock;
    ExperimentReport report = test::Unwrap(RunExperiment(cfg, {workers_}));
    *seconds = clock.Seconds();
    Info(absl::StrFormat("%s: %zu trials in %.1fs, %zu errors", cfg.name,
                         report.trials.size(), *seconds, report.errors));
    return report;
  }

  Outcome Criterion1() {
    bool pass = true;
    double total_seconds = 0;
    std::string summary;
    for (const char* name : {"thm2_lca.json", "thm2_random.json"}) {
      double seconds = 0;
      ExperimentConfig cfg = Load(name);
      ExperimentReport r = Campaign(cfg, &seconds);
      total_seconds += seconds;
      size_t full_rows = 0;
      size_t cf_valid = 0;
      size_t lo = std::numeric_limits<size_t>::max();
      size_t hi = 0;
      double sum = 0;
      size_t cf = 0;
      for (const TrialRecord& t : r.trials) {
        if (!t.collision_free.value_or(false)) continue;
        ++cf;
        cf_valid += t.valid;
        full_rows += t.refinement.delta_n == cfg.prefix.n;
        lo = std::min(lo, t.refinement.min_delta_d);
        hi = std::max(hi, t.refinement.min_delta_d);
        sum += t.refinement.min_delta_d;
      }
      Info(absl::StrFormat("  collision-free %s", Rate(r.collision_free)));
      Info(absl::StrFormat(
          "  collision-free trials with delta_N = %zu: %zu/%zu, valid: %zu/%zu",
          cfg.prefix.n, full_rows, cf, cf_valid, cf));
      if (cf > 0) {
        Info(absl::StrFormat(
            "  per-trial min delta_D on collision-free trials: min %zu, "
            "mean %.1f, max %zu (target %zu)",
            lo, sum / cf, hi, cfg.delta_d));
      }
      Info(absl::StrFormat("  daleth(%zu, %zu) %s", cfg.delta_n, cfg.delta_d,
                           Rate(r.daleth)));
      Info(absl::StrFormat("  collision-free success %s",
                           Rate(r.collision_free_success)));
      const bool ok = r.errors == 0 && r.daleth.rate >= 0.90 &&
                      r.collision_free_success.rate >= 0.99;
      pass = pass && ok;
      absl::StrAppend(&summary, summary.empty() ? "" : "; ", cfg.name,
                      absl::StrFormat(" daleth=%.3f cf_success=%.3f",
                                      r.daleth.rate,
                                      r.collision_free_success.rate));
    }
    pass = pass && total_seconds < 60;
    absl::StrAppend(&summary, absl::StrFormat("; %.1fs", total_seconds));
    return {pass, summary};
  }

  Outcome Criterion2() {
    double seconds = 0;
    ExperimentConfig cfg = Load("thm1.json");
    ExperimentReport r = Campaign(cfg, &seconds);
    const size_t floor = 3 * cfg.clustered.d / 8;
    size_t valid = 0;
    size_t deep = 0;
    size_t lo = std::numeric_limits<size_t>::max();
    for (const TrialRecord& t : r.trials) {
      valid += t.ok() && t.valid && t.refinement.holds;
      const bool changed = t.refinement.delta_n > 0;
      deep += !changed || t.refinement.min_delta_d >= floor;
      if (changed) lo = std::min(lo, t.refinement.min_delta_d);
    }
    const size_t n = r.trials.size();
    Info(absl::StrFormat("  valid %zu/%zu, rows with delta_D >= %zu in %zu/%zu "
                         "trials (smallest %zu)",
                         valid, n, floor, deep, n, lo));
    Info(absl::StrFormat("  mean downcoded clusters %.2f", r.mean_downcoded));
    const bool pass = r.errors == 0 && valid == n && deep == n &&
                      r.mean_downcoded >= 2.0 && seconds < 300;
    return {pass, absl::StrFormat("valid %zu/%zu, delta_D>=%zu %zu/%zu, "
                                  "mean downcoded %.2f, %.1fs",
                                  valid, n, floor, deep, n, r.mean_downcoded,
                                  seconds)};
  }

  Outcome Criterion3() {
    bool pass = true;
    std::string summary;
    size_t predicates = 0;
    size_t isolated = 0;
    ExperimentConfig random = Load("thm2_random.json");
    random.theorem = Theorem::kThm4;
    random.name = "thm4-random";
    const std::vector<ExperimentConfig> configs = {Load("thm4.json"), random,
                                                   Load("thm3.json")};
    for (const ExperimentConfig& cfg : configs) {
      double seconds = 0;
      ExperimentReport r = Campaign(cfg, &seconds);
      const bool clustered = UsesClustered(cfg.theorem);
      const bool disjoint =
          r.pairwise_disjoint.hits == r.pairwise_disjoint.total;
      predicates += r.isolation.total;
      isolated += r.isolation.hits;
      Info(absl::StrFormat("  disjoint %s", Rate(r.pairwise_disjoint)));
      Info(absl::StrFormat("  isolation %s", Rate(r.isolation)));
      Info(absl::StrFormat("  weight checks %zu, hits %u, max |mc - closed| "
                           "%.5f",
                           r.mc_checks, static_cast<unsigned>(r.mc_hits),
                           r.mc_max_abs_error));
      bool ok = r.errors == 0 && disjoint && r.mc_checks > 0;
      ok = ok && (clustered ? r.mc_hits == 0 : r.mc_max_abs_error <= 0.005);
      pass = pass && ok;
      absl::StrAppend(&summary, summary.empty() ? "" : "; ", cfg.name,
                      disjoint ? " disjoint" : " overlapping",
                      absl::StrFormat(" iso=%.4f", r.isolation.rate));
    }
    const double iso_rate =
        predicates == 0 ? 0.0 : static_cast<double>(isolated) / predicates;
    pass = pass && iso_rate >= 0.99;

    // Toy prefix instance: matches((5, 0)) under T = 5, k = 2.
    test::ToyPrefixFixture toy = test::MakeToyPrefix();
    std::vector<Predicate> psi = test::Unwrap(PsoPrefix(toy.y));
    PrefixParams p = test::Unwrap(PrefixParams::Make(2, 2, 2, 1.0));
    p.t = 5;
    auto dist = MakePrefixDistribution(p);
    PsoReport toy_report = PredicateSetReport(psi, toy.x, dist.get(), 100'000,
                                              DeriveSeed(3, 0));
    bool toy_ok = toy_report.size() == 2 && toy_report.pairwise_disjoint;
    for (const PredicateStats& s : toy_report.predicates) {
      const double mc = static_cast<double>(s.monte_carlo->hits) /
                        static_cast<double>(s.monte_carlo->samples);
      toy_ok = toy_ok && s.isolation == 1 && std::abs(mc - s.weight) <= 0.005;
      if (s.label == 5) {
        toy_ok = toy_ok && std::abs(s.weight - 0.0375) < 1e-12;
        Info(absl::StrFormat("  toy matches((5,0)): closed %.4f, mc %.4f",
                             s.weight, mc));
      }
    }
    pass = pass && toy_ok;
    absl::StrAppend(&summary,
                    absl::StrFormat("; overall isolation %.4f; toy %s",
                                    iso_rate, toy_ok ? "ok" : "mismatch"));
    return {pass, summary};
  }

  std::string ArtifactDir(int criterion) {
    const std::string dir = absl::StrCat(artifacts_, "/criterion", criterion);
    std::filesystem::create_directories(dir);
    return dir;
  }

  Outcome Criterion4() {
    Stopwatch clock;
    std::mt19937_64 rng(20260401);
    const std::string dir = ArtifactDir(4);
    const Strategy strategies[] = {Strategy::kTop, Strategy::kLcaPartition,
                                   Strategy::kRandomPartition};
    const int total = 100;
    int triple = 0;
    int minimal = 0;
    for (int i = 0; i < total; ++i) {
      test::TinyInstance inst = test::RandomTinyInstance(rng, 2);
      const AnonymizerConfig cfg{2, strategies[i % 3],
                                 static_cast<uint64_t>(i)};
      GeneralizedDataset y =
          test::Unwrap(Anonymize(inst.x, inst.hierarchies, cfg));
      const bool holds = CheckTriple(inst.x, y, 2).ok();
      const bool is_min = test::Unwrap(BruteForceIsMinimal(inst.x, y, 2));
      triple += holds;
      minimal += is_min;
      if (!holds || !is_min) {
        std::string text = test::DescribeInstance(inst, &y);
        auto better = test::Unwrap(FindStrictRefinement(inst.x, y, 2));
        if (better.has_value()) {
          absl::StrAppend(&text, "refinement:\n", GeneralizedToCsv(*better));
        }
        test::Unwrap(absl::StatusOr<bool>(
            WriteFile(absl::StrCat(dir, "/instance_", i, ".txt"), text).ok()));
      }
    }
    const double seconds = clock.Seconds();
    Info(absl::StrFormat("  triple %d/%d, brute-force minimal %d/%d, %.1fs",
                         triple, total, minimal, total, seconds));
    if (minimal < total) Info(absl::StrCat("  counterexamples in ", dir));
    const bool pass =
        triple == total && minimal * 100 >= total * 95 && seconds < 60;
    return {pass, absl::StrFormat("triple %d/%d, minimal %d/%d, %.1fs", triple,
                                  total, minimal, total, seconds)};
  }

  Outcome Criterion5() {
    bool pass = true;
    std::string summary;
    for (const char* name : {"thm2_lca.json", "thm2_random.json"}) {
      double seconds = 0;
      ExperimentConfig cfg = Load(name);
      ExperimentReport r = Campaign(cfg, &seconds);
      const double claim3_floor =
          cfg.prefix.d / (4.0 * cfg.prefix.k * std::exp(1.0));
      Info(absl::StrFormat("  claim 2 conformity %.4f on collision-free trials",
                           r.claim2_conformity));
      Info(absl::StrFormat("  claim 3 |D^t| >= %.2f: %s", claim3_floor,
                           Rate(r.claim3)));
      pass = pass && r.errors == 0 && r.claim2_conformity == 1.0 &&
             r.claim3.total > 0 && r.claim3.rate >= 0.99;
      absl::StrAppend(&summary, summary.empty() ? "" : "; ", cfg.name,
                      absl::StrFormat(" claim2=%.4f claim3=%.4f",
                                      r.claim2_conformity, r.claim3.rate));
    }
    double seconds = 0;
    ExperimentReport r = Campaign(Load("thm1.json"), &seconds);
    size_t confined = 0;
    size_t size_k = 0;
    for (const TrialRecord& t : r.trials) {
      confined += t.ok() && t.structure.nonconfined <= 1;
      size_k += t.structure.size_k_clusters;
    }
    Info(absl::StrFormat("  claim 1: %zu/%zu trials with <= 1 non-confined "
                         "size-k cluster (%zu size-k clusters, worst %zu)",
                         confined, r.trials.size(), size_k,
                         r.claim1_max_nonconfined));
    pass = pass && r.errors == 0 && confined == r.trials.size();
    absl::StrAppend(&summary, absl::StrFormat("; claim1 %zu/%zu", confined,
                                              r.trials.size()));
    return {pass, summary};
  }

  // Calls `fn` on every Z != y with x fitting Z row by row and Z inside y.
  // Returns false when the candidate space exceeds `limit`.
  static bool ForEachDowncoding(
      const Dataset& x, const GeneralizedDataset& y, uint64_t limit,
      const std::function<void(const GeneralizedDataset&)>& fn) {
    const size_t dims = y.dims();
    std::vector<std::vector<Cell>> options(y.size() * dims);
    uint64_t space = 1;
    for (size_t n = 0; n < y.size(); ++n) {
      for (size_t d = 0; d < dims; ++d) {
        options[n * dims + d] =
            RefinementChain(y.hierarchy(d), y.at(n, d), x.at(n, d));
        space *= options[n * dims + d].size();
        if (space > limit) return false;
      }
    }
    GeneralizedDataset z = y;
    std::function<void(size_t, bool)> walk = [&](size_t cell, bool changed) {
      if (cell == options.size()) {
        if (changed) fn(z);
        return;
      }
      const size_t n = cell / dims;
      const size_t d = cell % dims;
      for (size_t i = 0; i < options[cell].size(); ++i) {
        z.set(n, d, options[cell][i]);
        walk(cell + 1, changed || !(z.at(n, d) == y.at(n, d)));
      }
      z.set(n, d, y.at(n, d));
    };
    walk(0, false);
    return true;
  }

  Outcome Criterion6() {
    std::mt19937_64 rng(20260601);
    const std::string dir = ArtifactDir(6);
    const QuasiIdentifier all_dims[] = {QuasiIdentifier::All(1),
                                        QuasiIdentifier::All(2)};
    int instances = 0;
    int violating = 0;
    size_t downcodings = 0;
    for (int attempt = 0; attempt < 5000 && instances < 50; ++attempt) {
      test::TinyInstance inst = test::RandomTinyInstance(rng, 2);
      GeneralizedDataset y = test::Unwrap(Anonymize(
          inst.x, inst.hierarchies,
          {2, attempt % 2 ? Strategy::kLcaPartition : Strategy::kTop}));
      if (!test::Unwrap(BruteForceIsMinimal(inst.x, y, 2))) continue;
      size_t found = 0;
      size_t anonymous = 0;
      const QuasiIdentifier& q = all_dims[y.dims() - 1];
      const bool searched = ForEachDowncoding(
          inst.x, y, 200'000, [&](const GeneralizedDataset& z) {
            ++found;
            anonymous += test::Unwrap(IsKAnonymous(z, 2, q));
          });
      if (!searched || found == 0) continue;
      ++instances;
      downcodings += found;
      if (anonymous > 0) {
        ++violating;
        test::Unwrap(absl::StatusOr<bool>(
            WriteFile(absl::StrCat(dir, "/instance_", attempt, ".txt"),
                      test::DescribeInstance(inst, &y))
                .ok()));
      }
    }
    Info(absl::StrFormat("  %d minimal instances, %zu downcodings checked, "
                         "%d with a k-anonymous downcoding",
                         instances, downcodings, violating));
    const bool pass = instances == 50 && violating == 0;
    return {pass, absl::StrFormat("%d/%d instances with every downcoding "
                                  "non-anonymous (%zu downcodings)",
                                  instances - violating, instances,
                                  downcodings)};
  }

  Outcome Criterion7() {
    std::mt19937_64 rng(20260701);
    const size_t k = 5;
    int matched = 0;
    int dominated = 0;
    int plain_equal = 0;
    const int total = 50;
    for (int i = 0; i < total; ++i) {
      const size_t rows = std::uniform_int_distribution<size_t>(20, 200)(rng);
      const size_t cols = std::uniform_int_distribution<size_t>(3, 6)(rng);
      const double missing =
          std::uniform_real_distribution<double>(0.05, 0.3)(rng);
      AuditDataset y = test::RandomAuditDataset(rng, rows, cols, missing);
      std::vector<QuasiIdentifier> qis;
      for (int q = 0; q < 2; ++q) {
        QuasiIdentifier qi;
        qi.name = absl::StrCat("q", q);
        for (size_t c = 0; c < cols; ++c) {
          if (std::bernoulli_distribution(0.5)(rng)) qi.dims.push_back(c);
        }
        if (qi.dims.empty()) qi.dims.push_back(q % cols);
        qis.push_back(qi);
      }
      AuditTable table = test::Unwrap(Audit(y, qis, k));
      bool counts_ok = true;
      bool dominance_ok = true;
      for (const QiCounts& row : table.qis) {
        QiCounts oracle;
        for (size_t n = 0; n < y.size(); ++n) {
          const size_t ea = test::OracleAuditEa(y, n, row.dims);
          const size_t amb = test::OracleAuditAmb(y, n, row.dims);
          oracle.ea_unique += ea == 1;
          oracle.ea_below_k += ea < k;
          oracle.amb_unique += amb == 1;
          oracle.amb_below_k += amb < k;
        }
        counts_ok = counts_ok && oracle.ea_unique == row.ea_unique &&
                    oracle.ea_below_k == row.ea_below_k &&
                    oracle.amb_unique == row.amb_unique &&
                    oracle.amb_below_k == row.amb_below_k;
        const QuasiIdentifier q{row.dims, row.name};
        auto ea = test::Unwrap(AuditEffectiveAnonymities(y, q));
        auto amb = test::Unwrap(AmbiguousEffectiveAnonymities(y, q));
        for (size_t n = 0; n < y.size(); ++n) {
          dominance_ok = dominance_ok && amb[n] >= ea[n];
        }
      }
      matched += counts_ok;
      dominated += dominance_ok;

      AuditDataset plain = test::RandomAuditDataset(rng, rows, cols, 0, 0);
      bool equal = true;
      for (const QuasiIdentifier& q : qis) {
        equal = equal && test::Unwrap(AuditEffectiveAnonymities(plain, q)) ==
                             test::Unwrap(AmbiguousEffectiveAnonymities(plain, q));
      }
      plain_equal += equal;
    }
    Info(absl::StrFormat("  oracle counts %d/%d, EA_amb >= EA %d/%d, "
                         "no-missing EA_amb == EA %d/%d",
                         matched, total, dominated, total, plain_equal, total));
    const bool pass =
        matched == total && dominated == total && plain_equal == total;
    return {pass, absl::StrFormat("oracle %d/%d, dominance %d/%d, "
                                  "no-missing equality %d/%d",
                                  matched, total, dominated, total,
                                  plain_equal, total)};
  }

  Outcome Criterion8() {
    ClusteredParams clustered =
        test::Unwrap(ClusteredParams::Default(10, 1000, 64));
    const double big = test::BigFraction(clustered, 100'000, 20260801);
    const double inner = test::BigInnerMass(clustered, 100'000, 20260802);
    PrefixParams prefix = test::Unwrap(PrefixParams::Make(2, 8, 64, 0.1));
    const double collisions = test::CollisionRate(prefix, 10'000, 20260803);
    const double birthday = test::BirthdayCollision(prefix.n, prefix.t);
    Info(absl::StrFormat("  big fraction %.4f (target 0.1 +- 0.005)", big));
    Info(absl::StrFormat("  inner mass of big coordinates %.4f (target 0.490 "
                         "+- 0.01)",
                         inner));
    Info(absl::StrFormat("  collision rate N=%zu T=%zu: %.4f (birthday %.4f, "
                         "target 0.043 +- 0.01)",
                         prefix.n, prefix.t, collisions, birthday));
    const bool pass = std::abs(big - 0.1) <= 0.005 &&
                      std::abs(inner - 0.490) <= 0.01 &&
                      std::abs(collisions - 0.043) <= 0.01;
    return {pass, absl::StrFormat("big %.4f, inner %.4f, collisions %.4f", big,
                                  inner, collisions)};
  }

  std::string configs_;
  std::string artifacts_;
  size_t workers_;
};

}  // namespace
}  // namespace downcode

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks for the downcoding lab"};
  int criterion = 0;
  std::string configs = "configs";
  std::string artifacts = "artifacts";
  size_t workers = 1;
  app.add_option("--criterion", criterion, "Criterion 1-8; 0 runs all")
      ->check(CLI::Range(0, 8));
  app.add_option("--configs", configs, "Directory of campaign configs");
  app.add_option("--artifacts", artifacts, "Directory for counterexamples");
  app.add_option("--workers", workers, "Trial worker threads")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  downcode::Runner runner(configs, artifacts, workers);
  std::vector<int> selected;
  if (criterion == 0) {
    for (int c = 1; c <= 8; ++c) selected.push_back(c);
  } else {
    selected.push_back(criterion);
  }
  bool all = true;
  for (int c : selected) {
    const downcode::Outcome outcome = runner.Run(c);
    std::printf("criterion %d: %s  %s\n", c, outcome.pass ? "PASS" : "FAIL",
                outcome.summary.c_str());
    std::fflush(stdout);
    all = all && outcome.pass;
  }
  return all ? 0 : 1;
}
