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

// Command-line front end: sample, anon, attack, audit, experiment.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "downcode/anonymizer.h"
#include "downcode/attacks.h"
#include "downcode/audit.h"
#include "downcode/experiment.h"
#include "downcode/generators.h"
#include "downcode/io.h"

namespace downcode {
namespace {

constexpr int kExitError = 1;
constexpr int kExitGateFailure = 2;

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status << "\n";
  return kExitError;
}

absl::Status Emit(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
    if (!contents.empty() && contents.back() != '\n') std::cout << "\n";
    return absl::OkStatus();
  }
  return WriteFile(path, contents);
}

template <typename T>
absl::StatusOr<T> Load(const std::string& path,
                       absl::StatusOr<T> (*parse)(std::string_view)) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  return parse(*text);
}

struct SampleArgs {
  std::string params;
  uint64_t seed = 0;
  std::string out;
  std::string provenance;
  std::string hierarchy;
};

int RunSample(const SampleArgs& a) {
  absl::StatusOr<DistributionSpec> spec =
      Load<DistributionSpec>(a.params, DistributionFromJson);
  if (!spec.ok()) return Fail(spec.status());
  const bool clustered = spec->kind == SampleProvenance::Kind::kClustered;
  absl::StatusOr<std::pair<Dataset, SampleProvenance>> sample =
      clustered ? SampleClustered(spec->clustered, a.seed)
                : SamplePrefix(spec->prefix, a.seed);
  if (!sample.ok()) return Fail(sample.status());
  if (absl::Status s = Emit(a.out, DatasetToCsv(sample->first)); !s.ok()) {
    return Fail(s);
  }
  if (!a.provenance.empty()) {
    absl::Status s = WriteFile(a.provenance, ProvenanceToJson(sample->second));
    if (!s.ok()) return Fail(s);
  }
  if (!a.hierarchy.empty()) {
    absl::StatusOr<HierarchyPtr> h =
        clustered ? BuildClusteredHierarchy(spec->clustered)
                  : BuildPrefixHierarchy(spec->prefix.t);
    if (!h.ok()) return Fail(h.status());
    if (absl::Status s = WriteFile(a.hierarchy, HierarchyToJson(**h)); !s.ok()) {
      return Fail(s);
    }
  }
  return 0;
}

struct AnonArgs {
  std::string x;
  std::string hierarchy;
  size_t k = 2;
  std::string strategy = "top";
  uint64_t seed = 0;
  bool initial_only = false;
  std::string out;
};

int RunAnon(const AnonArgs& a) {
  absl::StatusOr<Dataset> x = Load<Dataset>(a.x, DatasetFromCsv);
  if (!x.ok()) return Fail(x.status());
  absl::StatusOr<std::string> htext = ReadFile(a.hierarchy);
  if (!htext.ok()) return Fail(htext.status());
  absl::StatusOr<std::vector<HierarchyPtr>> hs =
      HierarchiesFromJson(*htext, x->dims());
  if (!hs.ok()) return Fail(hs.status());
  absl::StatusOr<Strategy> strategy = ParseStrategy(a.strategy);
  if (!strategy.ok()) return Fail(strategy.status());
  AnonymizerConfig cfg{a.k, *strategy, a.seed};
  absl::StatusOr<GeneralizedDataset> y =
      a.initial_only ? InitialAnonymize(*x, *hs, cfg) : Anonymize(*x, *hs, cfg);
  if (!y.ok()) return Fail(y.status());
  if (absl::Status s = Emit(a.out, GeneralizedToCsv(*y)); !s.ok()) {
    return Fail(s);
  }
  return 0;
}

struct AttackArgs {
  std::string mode;
  std::string y;
  std::string hierarchy;
  std::string params;
  std::string out;
};

int RunAttack(const AttackArgs& a) {
  absl::StatusOr<std::string> ytext = ReadFile(a.y);
  if (!ytext.ok()) return Fail(ytext.status());
  absl::StatusOr<std::vector<std::vector<std::string>>> head = ParseCsv(*ytext);
  if (!head.ok()) return Fail(head.status());
  if (head->empty()) return Fail(absl::InvalidArgumentError("empty Y"));
  absl::StatusOr<std::string> htext = ReadFile(a.hierarchy);
  if (!htext.ok()) return Fail(htext.status());
  absl::StatusOr<std::vector<HierarchyPtr>> hs =
      HierarchiesFromJson(*htext, (*head)[0].size());
  if (!hs.ok()) return Fail(hs.status());
  absl::StatusOr<GeneralizedDataset> y = GeneralizedFromCsv(*ytext, *hs);
  if (!y.ok()) return Fail(y.status());

  const bool clustered = a.mode.find("clustered") != std::string::npos;
  DistributionSpec spec;
  if (clustered) {
    if (a.params.empty()) {
      return Fail(absl::InvalidArgumentError("--params is required"));
    }
    absl::StatusOr<DistributionSpec> loaded =
        Load<DistributionSpec>(a.params, DistributionFromJson);
    if (!loaded.ok()) return Fail(loaded.status());
    if (loaded->kind != SampleProvenance::Kind::kClustered) {
      return Fail(absl::InvalidArgumentError("clustered params expected"));
    }
    spec = *loaded;
  }

  if (a.mode == "downcode-clustered" || a.mode == "downcode-prefix") {
    absl::StatusOr<DowncodeOutput> out =
        clustered ? DowncodeClustered(*y, spec.clustered.k, spec.clustered)
                  : DowncodePrefix(*y);
    if (!out.ok()) return Fail(out.status());
    for (const ClusterAudit& c : out->audit) {
      std::cerr << "t=" << c.t << " " << ClusterActionName(c.action)
                << " rows=" << c.rows << " coarse=" << c.coarse_dims << "\n";
    }
    if (absl::Status s = Emit(a.out, GeneralizedToCsv(out->z)); !s.ok()) {
      return Fail(s);
    }
    return 0;
  }
  if (a.mode == "pso-clustered" || a.mode == "pso-prefix") {
    absl::StatusOr<std::vector<Predicate>> psi =
        clustered ? PsoClustered(*y, spec.clustered.k, spec.clustered)
                  : PsoPrefix(*y);
    if (!psi.ok()) return Fail(psi.status());
    if (absl::Status s = Emit(a.out, PredicatesToJson(*psi)); !s.ok()) {
      return Fail(s);
    }
    return 0;
  }
  return Fail(absl::InvalidArgumentError("unknown attack mode " + a.mode));
}

struct AuditArgs {
  std::string input;
  std::string missing = "?";
  std::vector<std::string> qis;
  size_t k = 5;
  size_t denominator = 0;
  std::string out;
};

int RunAudit(const AuditArgs& a) {
  absl::StatusOr<std::string> text = ReadFile(a.input);
  if (!text.ok()) return Fail(text.status());
  absl::StatusOr<AuditDataset> y = AuditDatasetFromCsv(*text, a.missing);
  if (!y.ok()) return Fail(y.status());
  std::vector<QuasiIdentifier> qis;
  for (const std::string& spec : a.qis) {
    absl::StatusOr<QuasiIdentifier> q = ParseQiSpec(*y, spec);
    if (!q.ok()) return Fail(q.status());
    qis.push_back(*std::move(q));
  }
  if (qis.empty()) qis.push_back(QuasiIdentifier::All(y->columns()));
  absl::StatusOr<AuditTable> table = Audit(*y, qis, a.k);
  if (!table.ok()) return Fail(table.status());
  if (a.denominator > 0) table->denominator = a.denominator;
  if (absl::Status s = Emit(a.out, AuditTableToJson(*table, *y)); !s.ok()) {
    return Fail(s);
  }
  return 0;
}

struct ExperimentArgs {
  std::string config;
  std::string out;
  size_t workers = 1;
};

int RunExperimentCommand(const ExperimentArgs& a) {
  absl::StatusOr<ExperimentConfig> cfg =
      Load<ExperimentConfig>(a.config, ParseExperimentConfig);
  if (!cfg.ok()) return Fail(cfg.status());
  absl::StatusOr<ExperimentReport> report =
      RunExperiment(*cfg, RunOptions{a.workers});
  if (!report.ok()) return Fail(report.status());
  if (absl::Status s = Emit(a.out, ReportToJson(*report)); !s.ok()) {
    return Fail(s);
  }
  std::ostream& log = a.out.empty() || a.out == "-" ? std::cerr : std::cout;
  log << cfg->name << ": " << report->trials.size() << " trials, daleth "
      << report->daleth.rate << " [" << report->daleth.lo << ", "
      << report->daleth.hi << "], errors " << report->errors << "\n";
  bool pass = true;
  for (const GateResult& g : EvaluateGates(*report)) {
    log << (g.pass ? "PASS " : "FAIL ") << g.name << " " << g.value
        << " >= " << g.threshold << "\n";
    pass = pass && g.pass;
  }
  return pass ? 0 : kExitGateFailure;
}

}  // namespace
}  // namespace downcode

int main(int argc, char** argv) {
  using namespace downcode;
  CLI::App app{"Hierarchical k-anonymity lab: anonymize, downcode, audit"};
  app.require_subcommand(1);

  SampleArgs sample;
  CLI::App* sc = app.add_subcommand("sample", "Draw a dataset");
  sc->add_option("--params", sample.params, "Distribution JSON")->required();
  sc->add_option("--seed", sample.seed, "RNG seed");
  sc->add_option("--out", sample.out, "X CSV (default stdout)");
  sc->add_option("--provenance", sample.provenance, "Latent labels JSON");
  sc->add_option("--hierarchy-out", sample.hierarchy, "Hierarchy JSON");

  AnonArgs anon;
  CLI::App* ac = app.add_subcommand("anon", "Minimal k-anonymization");
  ac->add_option("--x", anon.x, "Input X CSV")->required();
  ac->add_option("--hierarchy", anon.hierarchy, "Hierarchy JSON")->required();
  ac->add_option("--k", anon.k, "Anonymity parameter")->check(CLI::Range(2, 1 << 30));
  ac->add_option("--strategy", anon.strategy, "top, lca or random");
  ac->add_option("--seed", anon.seed, "Seed for the random strategy");
  ac->add_flag("--initial-only", anon.initial_only, "Skip minimization");
  ac->add_option("--out", anon.out, "Y CSV (default stdout)");

  AttackArgs attack;
  CLI::App* tc = app.add_subcommand("attack", "Downcoding and PSO adversaries");
  tc->add_option("mode", attack.mode,
                 "downcode-clustered, downcode-prefix, pso-clustered or "
                 "pso-prefix")
      ->required()
      ->check(CLI::IsMember({"downcode-clustered", "downcode-prefix",
                             "pso-clustered", "pso-prefix"}));
  tc->add_option("--y", attack.y, "Published Y CSV")->required();
  tc->add_option("--hierarchy", attack.hierarchy, "Hierarchy JSON")->required();
  tc->add_option("--params", attack.params, "Clustered distribution JSON");
  tc->add_option("--out", attack.out, "Z CSV or predicate JSON");

  AuditArgs audit;
  CLI::App* uc = app.add_subcommand("audit", "Effective anonymity counts");
  uc->add_option("--input", audit.input, "Data CSV")->required();
  uc->add_option("--missing", audit.missing, "Missing-value token");
  uc->add_option("--qi", audit.qis, "Comma separated columns; a..b ranges");
  uc->add_option("--k", audit.k, "Anonymity parameter")->check(CLI::Range(2, 1 << 30));
  uc->add_option("--denominator", audit.denominator, "Percentage base");
  uc->add_option("--out", audit.out, "Report JSON (default stdout)");

  ExperimentArgs exp;
  CLI::App* ec = app.add_subcommand("experiment", "Seeded trial campaign");
  ec->add_option("--config", exp.config, "Experiment JSON")->required();
  ec->add_option("--out", exp.out, "Report JSON (default stdout)");
  ec->add_option("--workers", exp.workers, "Parallel trials")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (sc->parsed()) return RunSample(sample);
  if (ac->parsed()) return RunAnon(anon);
  if (tc->parsed()) return RunAttack(attack);
  if (uc->parsed()) return RunAudit(audit);
  if (ec->parsed()) return RunExperimentCommand(exp);
  return 1;
}
