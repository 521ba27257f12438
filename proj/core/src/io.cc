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

#include "downcode/io.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <memory>
#include <sstream>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "downcode/scalar_format.h"
#include "nlohmann/json.hpp"
#include "string_compat.h"

namespace downcode {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

absl::StatusOr<Json> ParseJson(std::string_view text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) return absl::InvalidArgumentError("malformed JSON");
  return j;
}

// Typed field access that reports the key on failure.
template <typename T>
absl::StatusOr<T> Field(const Json& obj, std::string_view key) {
  if (!obj.is_object()) return absl::InvalidArgumentError("expected object");
  auto it = obj.find(std::string(key));
  if (it == obj.end()) {
    return absl::InvalidArgumentError(absl::StrCat("missing '", internal::Sv(key), "'"));
  }
  try {
    return it->get<T>();
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad '", internal::Sv(key), "': ", e.what()));
  }
}

template <typename T>
absl::StatusOr<T> FieldOr(const Json& obj, std::string_view key, T fallback) {
  if (obj.is_object() && !obj.contains(std::string(key))) return fallback;
  return Field<T>(obj, key);
}

OrderedJson SetToJson(const ValueSet& set) {
  OrderedJson j;
  if (set.kind() == ValueSet::Kind::kFinite) {
    j["values"] = set.values();
  } else {
    OrderedJson list = OrderedJson::array();
    for (const Interval& i : set.intervals()) list.push_back({i.lo, i.hi});
    j["intervals"] = std::move(list);
  }
  return j;
}

absl::StatusOr<ValueSet> SetFromJson(const Json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("set must be an object");
  if (j.contains("values")) {
    absl::StatusOr<std::vector<Scalar>> v = Field<std::vector<Scalar>>(j, "values");
    if (!v.ok()) return v.status();
    return ValueSet::Finite(*std::move(v));
  }
  absl::StatusOr<std::vector<std::vector<Scalar>>> raw =
      Field<std::vector<std::vector<Scalar>>>(j, "intervals");
  if (!raw.ok()) return raw.status();
  std::vector<Interval> intervals;
  for (const std::vector<Scalar>& pair : *raw) {
    if (pair.size() != 2 || !(pair[0] < pair[1])) {
      return absl::InvalidArgumentError("interval must be [lo, hi] with lo < hi");
    }
    intervals.push_back({pair[0], pair[1], false});
  }
  return ValueSet::Intervals(std::move(intervals));
}

absl::StatusOr<HierarchyPtr> HierarchyFromValue(const Json& j) {
  absl::StatusOr<std::string> id = Field<std::string>(j, "id");
  if (!id.ok()) return id.status();
  if (!j.contains("domain") || !j.contains("nodes")) {
    return absl::InvalidArgumentError("hierarchy needs 'domain' and 'nodes'");
  }
  const Json& dom = j["domain"];
  absl::StatusOr<std::string> kind = Field<std::string>(dom, "kind");
  if (!kind.ok()) return kind.status();
  absl::StatusOr<AttributeDomain> domain;
  if (*kind == "real-interval") {
    absl::StatusOr<Scalar> lo = Field<Scalar>(dom, "lo");
    absl::StatusOr<Scalar> hi = Field<Scalar>(dom, "hi");
    if (!lo.ok()) return lo.status();
    if (!hi.ok()) return hi.status();
    domain = AttributeDomain::RealInterval(*lo, *hi);
  } else if (*kind == "finite") {
    absl::StatusOr<std::vector<Scalar>> values =
        Field<std::vector<Scalar>>(dom, "values");
    if (!values.ok()) return values.status();
    domain = AttributeDomain::Finite(*std::move(values));
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown domain kind '", *kind, "'"));
  }
  if (!domain.ok()) return domain.status();
  if (!j["nodes"].is_array()) {
    return absl::InvalidArgumentError("'nodes' must be an array");
  }
  std::vector<NodeSpec> specs;
  for (const Json& node : j["nodes"]) {
    NodeSpec spec;
    absl::StatusOr<std::string> nid = Field<std::string>(node, "id");
    if (!nid.ok()) return nid.status();
    spec.id = *nid;
    if (node.contains("parent") && !node["parent"].is_null()) {
      absl::StatusOr<std::string> parent = Field<std::string>(node, "parent");
      if (!parent.ok()) return parent.status();
      spec.parent = *parent;
    }
    if (!node.contains("set")) {
      return absl::InvalidArgumentError(
          absl::StrCat("node '", spec.id, "' has no 'set'"));
    }
    absl::StatusOr<ValueSet> set = SetFromJson(node["set"]);
    if (!set.ok()) return set.status();
    spec.set = *std::move(set);
    specs.push_back(std::move(spec));
  }
  absl::StatusOr<Hierarchy> h =
      Hierarchy::Create(*id, *std::move(domain), std::move(specs));
  if (!h.ok()) return h.status();
  return std::make_shared<const Hierarchy>(*std::move(h));
}

OrderedJson HierarchyValue(const Hierarchy& h) {
  OrderedJson j;
  j["id"] = h.name();
  const AttributeDomain& d = h.domain();
  if (d.kind() == AttributeDomain::Kind::kRealInterval) {
    j["domain"] = {{"kind", "real-interval"}, {"lo", d.lo()}, {"hi", d.hi()}};
  } else {
    j["domain"] = {{"kind", "finite"}, {"values", d.values()}};
  }
  OrderedJson nodes = OrderedJson::array();
  for (const NodeSpec& spec : h.Specs()) {
    OrderedJson n;
    n["id"] = spec.id;
    n["parent"] = spec.parent.has_value() ? OrderedJson(*spec.parent)
                                          : OrderedJson(nullptr);
    n["set"] = SetToJson(spec.set);
    nodes.push_back(std::move(n));
  }
  j["nodes"] = std::move(nodes);
  return j;
}

std::string Unbrace(std::string_view s) {
  return std::string(s.substr(1, s.size() - 2));
}

}  // namespace

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

absl::Status WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::InternalError(absl::StrCat("cannot write ", path));
  out << contents;
  out.close();
  if (!out) return absl::InternalError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::vector<std::vector<std::string>>> ParseCsv(
    std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  size_t line = 1;
  auto end_row = [&]() {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) {
          return absl::InvalidArgumentError(
              absl::StrCat("stray quote on line ", line));
        }
        quoted = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (quoted) return absl::InvalidArgumentError("unterminated quoted field");
  if (field_started || !row.empty()) end_row();
  return rows;
}

std::string FormatCsvRow(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n\r") == std::string::npos) {
      out += f;
      continue;
    }
    out.push_back('"');
    for (char c : f) {
      if (c == '"') out.push_back('"');
      out.push_back(c);
    }
    out.push_back('"');
  }
  out.push_back('\n');
  return out;
}

std::string DatasetToCsv(const Dataset& x) {
  std::vector<std::string> header;
  for (size_t d = 0; d < x.dims(); ++d) header.push_back(absl::StrCat("x", d + 1));
  std::string out = FormatCsvRow(header);
  for (size_t n = 0; n < x.size(); ++n) {
    std::vector<std::string> fields;
    for (Scalar v : x.row(n)) fields.push_back(FormatScalar(v));
    out += FormatCsvRow(fields);
  }
  return out;
}

absl::StatusOr<Dataset> DatasetFromCsv(std::string_view text) {
  absl::StatusOr<std::vector<std::vector<std::string>>> rows = ParseCsv(text);
  if (!rows.ok()) return rows.status();
  if (rows->empty()) return absl::InvalidArgumentError("missing header");
  const size_t dims = (*rows)[0].size();
  Dataset x(dims);
  std::vector<Scalar> values(dims);
  for (size_t r = 1; r < rows->size(); ++r) {
    const std::vector<std::string>& row = (*rows)[r];
    if (row.size() != dims) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", r, " has ", row.size(), " fields, expected ",
                       dims));
    }
    for (size_t d = 0; d < dims; ++d) {
      absl::StatusOr<Scalar> v = ParseScalar(internal::Std(absl::StripAsciiWhitespace(row[d])));
      if (!v.ok()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "row ", r, " column ", d + 1, ": ", v.status().message()));
      }
      values[d] = *v;
    }
    x.AddRow(values);
  }
  return x;
}

std::string CellToString(const Hierarchy& h, Cell c) {
  if (c.is_exact()) return absl::StrCat("v:", FormatScalar(c.value()));
  return absl::StrCat("n:", h.id(c.node()));
}

absl::StatusOr<Cell> CellFromString(const Hierarchy& h,
                                    std::string_view text) {
  absl::string_view s = absl::StripAsciiWhitespace(internal::Sv(text));
  if (absl::ConsumePrefix(&s, "v:")) {
    absl::StatusOr<Scalar> v = ParseScalar(internal::Std(s));
    if (!v.ok()) return v.status();
    const Cell c = Cell::Exact(*v);
    if (absl::Status st = h.ValidateCell(c); !st.ok()) return st;
    return c;
  }
  if (absl::ConsumePrefix(&s, "n:")) {
    std::optional<NodeIndex> n = h.Find(internal::Std(s));
    if (!n.has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown node '", s, "' in ", h.name()));
    }
    return h.Canonical(Cell::Node(*n));
  }
  return absl::InvalidArgumentError(
      absl::StrCat("cell '", s, "' needs a v: or n: prefix"));
}

std::string GeneralizedToCsv(const GeneralizedDataset& y) {
  std::vector<std::string> header;
  for (size_t d = 0; d < y.dims(); ++d) header.push_back(y.hierarchy(d).name());
  std::string out = FormatCsvRow(header);
  for (size_t n = 0; n < y.size(); ++n) {
    std::vector<std::string> fields;
    for (size_t d = 0; d < y.dims(); ++d) {
      fields.push_back(CellToString(y.hierarchy(d), y.at(n, d)));
    }
    out += FormatCsvRow(fields);
  }
  return out;
}

absl::StatusOr<GeneralizedDataset> GeneralizedFromCsv(
    std::string_view text, const std::vector<HierarchyPtr>& hierarchies) {
  absl::StatusOr<std::vector<std::vector<std::string>>> rows = ParseCsv(text);
  if (!rows.ok()) return rows.status();
  if (rows->empty()) return absl::InvalidArgumentError("missing header");
  const size_t dims = hierarchies.size();
  if ((*rows)[0].size() != dims) {
    return absl::InvalidArgumentError(
        absl::StrCat("header has ", (*rows)[0].size(), " columns, expected ",
                     dims));
  }
  std::vector<GeneralizedRecord> records;
  for (size_t r = 1; r < rows->size(); ++r) {
    const std::vector<std::string>& row = (*rows)[r];
    if (row.size() != dims) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", r, " has ", row.size(), " fields"));
    }
    GeneralizedRecord rec;
    for (size_t d = 0; d < dims; ++d) {
      absl::StatusOr<Cell> c = CellFromString(*hierarchies[d], row[d]);
      if (!c.ok()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "row ", r, " column ", d + 1, ": ", c.status().message()));
      }
      rec.push_back(*c);
    }
    records.push_back(std::move(rec));
  }
  return GeneralizedDataset::Create(hierarchies, std::move(records));
}

std::string HierarchyToJson(const Hierarchy& h) {
  return HierarchyValue(h).dump(2);
}

absl::StatusOr<HierarchyPtr> HierarchyFromJson(std::string_view text) {
  absl::StatusOr<Json> j = ParseJson(text);
  if (!j.ok()) return j.status();
  return HierarchyFromValue(*j);
}

absl::StatusOr<std::vector<HierarchyPtr>> HierarchiesFromJson(
    std::string_view text, size_t dims) {
  absl::StatusOr<Json> j = ParseJson(text);
  if (!j.ok()) return j.status();
  if (j->is_object()) {
    absl::StatusOr<HierarchyPtr> h = HierarchyFromValue(*j);
    if (!h.ok()) return h.status();
    return std::vector<HierarchyPtr>(dims, *h);
  }
  if (!j->is_array() || j->size() != dims) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected one hierarchy or a list of ", dims));
  }
  std::vector<HierarchyPtr> out;
  for (const Json& item : *j) {
    absl::StatusOr<HierarchyPtr> h = HierarchyFromValue(item);
    if (!h.ok()) return h.status();
    out.push_back(*h);
  }
  return out;
}

std::string DistributionToJson(const DistributionSpec& spec) {
  OrderedJson j;
  if (spec.kind == SampleProvenance::Kind::kClustered) {
    const ClusteredParams& p = spec.clustered;
    j["kind"] = "clustered";
    j["mode"] =
        p.mode == ClusteredParams::Mode::kDefault ? "default" : "asymptotic";
    j["k"] = p.k;
    j["n"] = p.n;
    j["d"] = p.d;
    j["p_big"] = p.p_big;
  } else {
    const PrefixParams& p = spec.prefix;
    j["kind"] = "prefix";
    j["k"] = p.k;
    j["n"] = p.n;
    j["d"] = p.d;
    j["alpha"] = p.alpha;
    j["t"] = p.t;
    j["p_spike"] = p.p_spike;
  }
  return j.dump(2);
}

absl::StatusOr<DistributionSpec> DistributionFromJson(std::string_view text) {
  absl::StatusOr<Json> j = ParseJson(text);
  if (!j.ok()) return j.status();
  absl::StatusOr<std::string> kind = Field<std::string>(*j, "kind");
  absl::StatusOr<size_t> k = Field<size_t>(*j, "k");
  absl::StatusOr<size_t> n = Field<size_t>(*j, "n");
  absl::StatusOr<size_t> d = Field<size_t>(*j, "d");
  for (const absl::Status& s : {kind.status(), k.status(), n.status(), d.status()}) {
    if (!s.ok()) return s;
  }
  DistributionSpec spec;
  if (*kind == "clustered") {
    spec.kind = SampleProvenance::Kind::kClustered;
    absl::StatusOr<std::string> mode =
        FieldOr<std::string>(*j, "mode", "default");
    if (!mode.ok()) return mode.status();
    absl::StatusOr<ClusteredParams> p;
    if (*mode == "default") {
      p = ClusteredParams::Default(*k, *n, *d);
    } else if (*mode == "asymptotic") {
      p = ClusteredParams::Asymptotic(*k, *n, *d);
    } else {
      return absl::InvalidArgumentError(absl::StrCat("unknown mode '", *mode, "'"));
    }
    if (!p.ok()) return p.status();
    absl::StatusOr<double> p_big = FieldOr<double>(*j, "p_big", p->p_big);
    if (!p_big.ok()) return p_big.status();
    p->p_big = *p_big;
    if (absl::Status s = p->Validate(); !s.ok()) return s;
    spec.clustered = *std::move(p);
  } else if (*kind == "prefix") {
    spec.kind = SampleProvenance::Kind::kPrefix;
    absl::StatusOr<double> alpha = FieldOr<double>(*j, "alpha", 0.1);
    if (!alpha.ok()) return alpha.status();
    absl::StatusOr<PrefixParams> p = PrefixParams::Make(*k, *n, *d, *alpha);
    if (!p.ok()) return p.status();
    absl::StatusOr<size_t> t = FieldOr<size_t>(*j, "t", p->t);
    absl::StatusOr<double> spike = FieldOr<double>(*j, "p_spike", p->p_spike);
    if (!t.ok()) return t.status();
    if (!spike.ok()) return spike.status();
    p->t = *t;
    p->p_spike = *spike;
    if (absl::Status s = p->Validate(); !s.ok()) return s;
    spec.prefix = *p;
  } else {
    return absl::InvalidArgumentError(absl::StrCat("unknown kind '", *kind, "'"));
  }
  return spec;
}

std::string ProvenanceToJson(const SampleProvenance& prov) {
  OrderedJson j;
  j["kind"] =
      prov.kind == SampleProvenance::Kind::kClustered ? "clustered" : "prefix";
  j["latent"] = prov.latent;
  if (prov.kind == SampleProvenance::Kind::kClustered) {
    j["big"] = std::vector<bool>(prov.big.begin(), prov.big.end());
  }
  return j.dump(2);
}

absl::StatusOr<SampleProvenance> ProvenanceFromJson(std::string_view text) {
  absl::StatusOr<Json> j = ParseJson(text);
  if (!j.ok()) return j.status();
  absl::StatusOr<std::string> kind = Field<std::string>(*j, "kind");
  if (!kind.ok()) return kind.status();
  SampleProvenance prov;
  if (*kind == "clustered") {
    prov.kind = SampleProvenance::Kind::kClustered;
  } else if (*kind == "prefix") {
    prov.kind = SampleProvenance::Kind::kPrefix;
  } else {
    return absl::InvalidArgumentError(absl::StrCat("unknown kind '", *kind, "'"));
  }
  absl::StatusOr<std::vector<size_t>> latent =
      Field<std::vector<size_t>>(*j, "latent");
  if (!latent.ok()) return latent.status();
  prov.latent = *std::move(latent);
  if (prov.kind == SampleProvenance::Kind::kClustered) {
    absl::StatusOr<std::vector<bool>> big = Field<std::vector<bool>>(*j, "big");
    if (!big.ok()) return big.status();
    if (big->size() != prov.latent.size()) {
      return absl::InvalidArgumentError("'big' and 'latent' lengths differ");
    }
    prov.big = *std::move(big);
  }
  return prov;
}

std::string PredicatesToJson(const std::vector<Predicate>& psi) {
  OrderedJson list = OrderedJson::array();
  for (const Predicate& p : psi) {
    OrderedJson cells = OrderedJson::array();
    for (size_t d = 0; d < p.box.size(); ++d) {
      cells.push_back(CellToString(*p.hierarchies[d], p.box[d]));
    }
    list.push_back({{"label", p.label}, {"cells", std::move(cells)}});
  }
  return list.dump(2);
}

absl::StatusOr<std::vector<Predicate>> PredicatesFromJson(
    std::string_view text, const std::vector<HierarchyPtr>& hierarchies) {
  absl::StatusOr<Json> j = ParseJson(text);
  if (!j.ok()) return j.status();
  if (!j->is_array()) return absl::InvalidArgumentError("expected a list");
  std::vector<Predicate> out;
  for (const Json& item : *j) {
    absl::StatusOr<size_t> label = Field<size_t>(item, "label");
    absl::StatusOr<std::vector<std::string>> cells =
        Field<std::vector<std::string>>(item, "cells");
    if (!label.ok()) return label.status();
    if (!cells.ok()) return cells.status();
    if (cells->size() != hierarchies.size()) {
      return absl::InvalidArgumentError("predicate dimension mismatch");
    }
    Predicate p;
    p.label = *label;
    p.hierarchies = hierarchies;
    for (size_t d = 0; d < cells->size(); ++d) {
      absl::StatusOr<Cell> c = CellFromString(*hierarchies[d], (*cells)[d]);
      if (!c.ok()) return c.status();
      p.box.push_back(*c);
    }
    out.push_back(std::move(p));
  }
  return out;
}

absl::StatusOr<AuditDataset> AuditDatasetFromCsv(std::string_view text,
                                                 std::string_view missing) {
  absl::StatusOr<std::vector<std::vector<std::string>>> rows = ParseCsv(text);
  if (!rows.ok()) return rows.status();
  if (rows->empty()) return absl::InvalidArgumentError("missing header");
  std::vector<std::string> columns = (*rows)[0];
  std::vector<std::vector<AuditCell>> cells;
  for (size_t r = 1; r < rows->size(); ++r) {
    const std::vector<std::string>& row = (*rows)[r];
    if (row.size() != columns.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", r, " has ", row.size(), " fields, expected ",
                       columns.size()));
    }
    std::vector<AuditCell> out;
    for (const std::string& raw : row) {
      std::string_view f = internal::Std(absl::StripAsciiWhitespace(raw));
      if (f == missing) {
        out.push_back(AuditCell::Missing());
      } else if (f.size() >= 2 && f.front() == '{' && f.back() == '}') {
        std::vector<std::string> members =
            absl::StrSplit(Unbrace(f), '|', absl::SkipEmpty());
        if (members.empty()) {
          return absl::InvalidArgumentError(
              absl::StrCat("row ", r, ": empty set cell"));
        }
        out.push_back(AuditCell::Set(std::move(members)));
      } else {
        out.push_back(AuditCell::Value(std::string(f)));
      }
    }
    cells.push_back(std::move(out));
  }
  return AuditDataset::Create(std::move(columns), std::move(cells));
}

absl::StatusOr<QuasiIdentifier> ParseQiSpec(const AuditDataset& y,
                                            std::string_view spec) {
  QuasiIdentifier q;
  q.name = std::string(spec);
  auto add = [&](std::string_view name) -> absl::Status {
    std::optional<size_t> c = y.ColumnIndex(name);
    if (!c.has_value()) {
      return absl::InvalidArgumentError(absl::StrCat("no column '", internal::Sv(name), "'"));
    }
    if (std::find(q.dims.begin(), q.dims.end(), *c) == q.dims.end()) {
      q.dims.push_back(*c);
    }
    return absl::OkStatus();
  };
  for (absl::string_view piece :
       absl::StrSplit(internal::Sv(spec), ',', absl::SkipEmpty())) {
    std::string_view part = internal::Std(absl::StripAsciiWhitespace(piece));
    const size_t dots = part.find("..");
    if (dots == std::string_view::npos) {
      if (absl::Status s = add(part); !s.ok()) return s;
      continue;
    }
    std::string_view lo = part.substr(0, dots);
    std::string_view hi = part.substr(dots + 2);
    size_t stem = lo.size();
    while (stem > 0 && absl::ascii_isdigit(lo[stem - 1])) --stem;
    std::string_view prefix = lo.substr(0, stem);
    if (!hi.starts_with(prefix) || stem == lo.size() ||
        hi.size() == prefix.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad column range '", internal::Sv(part), "'"));
    }
    hi.remove_prefix(prefix.size());
    int first = 0;
    int last = 0;
    std::string_view a = lo.substr(stem);
    auto r1 = std::from_chars(a.data(), a.data() + a.size(), first);
    auto r2 = std::from_chars(hi.data(), hi.data() + hi.size(), last);
    if (r1.ec != std::errc() || r2.ec != std::errc() ||
        r2.ptr != hi.data() + hi.size() || first > last) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad column range '", internal::Sv(part), "'"));
    }
    for (int i = first; i <= last; ++i) {
      absl::Status s = add(absl::StrCat(internal::Sv(prefix), i));
      if (!s.ok()) return s;
    }
  }
  if (q.dims.empty()) return absl::InvalidArgumentError("empty QI");
  return q;
}

std::string AuditTableToJson(const AuditTable& table, const AuditDataset& y) {
  OrderedJson j;
  j["k"] = table.k;
  j["rows"] = table.rows;
  if (table.denominator.has_value()) j["denominator"] = *table.denominator;
  const double denom = static_cast<double>(
      table.denominator.value_or(std::max<size_t>(table.rows, 1)));
  OrderedJson qis = OrderedJson::array();
  for (const QiCounts& c : table.qis) {
    OrderedJson cols = OrderedJson::array();
    for (size_t d : c.dims) cols.push_back(y.column_name(d));
    auto cell = [&](size_t count) {
      return OrderedJson{{"count", count}, {"percent", 100.0 * count / denom}};
    };
    qis.push_back({{"qi", c.name},
                   {"columns", std::move(cols)},
                   {"ea_unique", cell(c.ea_unique)},
                   {"ea_below_k", cell(c.ea_below_k)},
                   {"amb_unique", cell(c.amb_unique)},
                   {"amb_below_k", cell(c.amb_below_k)}});
  }
  j["table"] = std::move(qis);
  return j.dump(2);
}

}  // namespace downcode
