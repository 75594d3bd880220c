// Copyright 2026 The entnas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "entnas/json_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "entnas/errors.hpp"

namespace entnas {

namespace {

template <typename T>
T required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T optional_field(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("field '") + key + "': " + e.what());
  }
}

void check_schema(const Json& j, bool must_exist = true) {
  if (!j.is_object()) throw SchemaError("expected a JSON object");
  if (!j.contains("schema")) {
    if (must_exist) throw SchemaError("missing field 'schema'");
    return;
  }
  if (required<int>(j, "schema") != kSchemaVersion) {
    throw SchemaError("unsupported schema version " + j.at("schema").dump());
  }
}

void check_kind(const Json& j, const char* kind) {
  if (required<std::string>(j, "kind") != kind) {
    throw SchemaError(std::string("expected a document of kind '") + kind + "'");
  }
}

std::vector<int> choices_from_json(const Json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
  const Json& v = j.at(key);
  if (v.is_object()) {
    const int lo = required<int>(v, "min");
    const int hi = required<int>(v, "max");
    const int step = required<int>(v, "step");
    if (step <= 0) throw SchemaError(std::string(key) + ": step must be positive");
    return arange(lo, hi, step);
  }
  return required<std::vector<int>>(j, key);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<Estimator> kEstimators[] = {{Estimator::plain, "plain"},
                                               {Estimator::logdet_control, "logdet_control"}};
constexpr EnumName<SpectrumMethod> kSpectra[] = {
    {SpectrumMethod::gram_eigen, "gram_eigen"}, {SpectrumMethod::bidiagonal_svd, "bidiagonal_svd"}};

template <typename E, std::size_t N>
const char* enum_name(const EnumName<E> (&table)[N], E v) {
  for (const auto& e : table) {
    if (e.value == v) return e.name;
  }
  return "unknown";
}

template <typename E, std::size_t N>
E enum_value(const EnumName<E> (&table)[N], const std::string& s, const char* field) {
  for (const auto& e : table) {
    if (s == e.name) return e.value;
  }
  throw SchemaError(std::string("field '") + field + "': unknown value '" + s + "'");
}

void expect_literal(const Json& j, const char* key, const char* only) {
  const auto v = optional_field<std::string>(j, key, only);
  if (v != only) {
    throw SchemaError(std::string("field '") + key + "': only '" + only + "' is supported");
  }
}

}  // namespace

Json arch_to_json(const ArchConfig& arch) {
  Json j;
  j["schema"] = kSchemaVersion;
  Json blocks = Json::array();
  for (const auto& b : arch.blocks) {
    Json jb;
    jb["embed_dim"] = b.embed_dim;
    jb["ffn_dim"] = b.ffn_dim;
    jb["depth"] = b.depth;
    blocks.push_back(jb);
  }
  j["blocks"] = blocks;
  j["embed_proj_dim"] = arch.embed_proj_dim;
  j["max_positions"] = arch.max_positions;
  j["vocab_size"] = arch.vocab_size;
  j["head_dim"] = arch.head_dim;
  j["param_sharing"] = arch.param_sharing;
  return j;
}

ArchConfig arch_from_json(const Json& j) {
  check_schema(j);
  ArchConfig arch;
  if (!j.contains("blocks") || !j.at("blocks").is_array()) {
    throw SchemaError("field 'blocks' must be an array");
  }
  for (const Json& jb : j.at("blocks")) {
    BlockSpec b;
    b.embed_dim = required<int>(jb, "embed_dim");
    if (jb.contains("ffn_dim")) {
      b.ffn_dim = required<int>(jb, "ffn_dim");
    } else {
      b.ffn_dim = static_cast<int>(std::lround(required<double>(jb, "ffn_ratio") * b.embed_dim));
    }
    b.depth = required<int>(jb, "depth");
    arch.blocks.push_back(b);
  }
  arch.embed_proj_dim = optional_field(j, "embed_proj_dim", arch.embed_proj_dim);
  arch.max_positions = optional_field(j, "max_positions", arch.max_positions);
  arch.vocab_size = optional_field(j, "vocab_size", arch.vocab_size);
  arch.head_dim = optional_field(j, "head_dim", arch.head_dim);
  arch.param_sharing = optional_field(j, "param_sharing", arch.param_sharing);
  const Verdict v = check_structure(arch);
  if (!v.ok()) throw SchemaError("invalid architecture: " + v.describe());
  return arch;
}

Json space_to_json(const SearchSpaceDef& space) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["embed_choices"] = space.embed_choices;
  j["ffn_choices"] = space.ffn_choices;
  j["depth_choices"] = space.depth_choices;
  j["num_blocks"] = space.num_blocks;
  j["head_dim"] = space.head_dim;
  return j;
}

SearchSpaceDef space_from_json(const Json& j) {
  check_schema(j);
  SearchSpaceDef s;
  s.embed_choices = choices_from_json(j, "embed_choices");
  s.ffn_choices = choices_from_json(j, "ffn_choices");
  s.depth_choices = choices_from_json(j, "depth_choices");
  s.num_blocks = optional_field(j, "num_blocks", 4);
  s.head_dim = optional_field(j, "head_dim", kHeadDim);
  check_space(s);
  return s;
}

Json entropy_config_to_json(const EntropyConfig& cfg) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["epsilon"] = cfg.epsilon;
  j["beta"] = cfg.beta;
  j["alpha_mhsa"] = cfg.alpha_mhsa;
  j["alpha_ffn"] = cfg.alpha_ffn;
  j["matrix_log_base"] = "natural";
  j["width_log_base"] = "base2";
  j["init_rule"] = "glorot";
  j["mc_samples"] = cfg.mc_samples;
  j["mc_entry_budget"] = cfg.mc_entry_budget;
  j["estimator"] = enum_name(kEstimators, cfg.estimator);
  j["spectrum"] = enum_name(kSpectra, cfg.spectrum);
  j["seed"] = cfg.seed;
  return j;
}

EntropyConfig entropy_config_from_json(const Json& j) {
  check_schema(j);
  EntropyConfig cfg;
  cfg.epsilon = optional_field(j, "epsilon", cfg.epsilon);
  cfg.beta = optional_field(j, "beta", cfg.beta);
  cfg.alpha_mhsa = optional_field(j, "alpha_mhsa", cfg.alpha_mhsa);
  cfg.alpha_ffn = optional_field(j, "alpha_ffn", cfg.alpha_ffn);
  expect_literal(j, "matrix_log_base", "natural");
  expect_literal(j, "width_log_base", "base2");
  expect_literal(j, "init_rule", "glorot");
  cfg.mc_samples = optional_field(j, "mc_samples", cfg.mc_samples);
  cfg.mc_entry_budget = optional_field(j, "mc_entry_budget", cfg.mc_entry_budget);
  cfg.estimator = enum_value(kEstimators,
                             optional_field<std::string>(j, "estimator", "logdet_control"),
                             "estimator");
  cfg.spectrum = enum_value(kSpectra, optional_field<std::string>(j, "spectrum", "gram_eigen"),
                            "spectrum");
  cfg.seed = optional_field<std::uint64_t>(j, "seed", cfg.seed);
  try {
    check_config(cfg);
  } catch (const DomainError& e) {
    throw SchemaError(e.what());
  }
  return cfg;
}

Json table_to_json(const EntropyTable& table) {
  const TableMeta& m = table.meta();
  Json meta;
  meta["config"] = entropy_config_to_json(m.config);
  meta["space"] = m.space ? space_to_json(*m.space) : Json(nullptr);
  meta["embed_proj_dim"] = m.embed_proj_dim;
  Json extras = Json::array();
  for (const auto& a : m.extra_archs) extras.push_back(arch_to_json(a));
  meta["extra_archs"] = extras;
  meta["build_timestamp"] = m.build_timestamp;
  meta["entry_count"] = table.size();

  Json entries = Json::array();
  for (const auto& e : table.entries()) entries.push_back(Json::array({e.shape.rows, e.shape.cols, e.value}));

  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "entnas.entropy_table";
  j["meta"] = meta;
  j["entries"] = entries;
  return j;
}

EntropyTable table_from_json(const Json& j) {
  check_schema(j);
  check_kind(j, "entnas.entropy_table");
  if (!j.contains("meta") || !j.contains("entries")) throw SchemaError("table needs meta and entries");
  const Json& jm = j.at("meta");
  TableMeta meta;
  meta.config = entropy_config_from_json(jm.at("config"));
  if (jm.contains("space") && !jm.at("space").is_null()) meta.space = space_from_json(jm.at("space"));
  meta.embed_proj_dim = optional_field(jm, "embed_proj_dim", 768);
  if (jm.contains("extra_archs")) {
    for (const Json& a : jm.at("extra_archs")) meta.extra_archs.push_back(arch_from_json(a));
  }
  meta.build_timestamp = optional_field<std::string>(jm, "build_timestamp", "");

  std::vector<TableEntry> entries;
  for (const Json& e : j.at("entries")) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
        !e[2].is_number()) {
      throw SchemaError("table entry must be [rows, cols, value]: " + e.dump());
    }
    entries.push_back({{e[0].get<int>(), e[1].get<int>()}, e[2].get<double>()});
  }
  const auto count = optional_field<std::size_t>(jm, "entry_count", entries.size());
  if (count != entries.size()) {
    throw SchemaError("table declares " + std::to_string(count) + " entries but holds " +
                      std::to_string(entries.size()));
  }
  return EntropyTable(std::move(meta), std::move(entries));
}

Json profile_to_json(const DeviceProfile& profile) {
  Json j;
  j["device_name"] = profile.device_name;
  j["seq_len"] = profile.seq_len;
  j["overhead_ms"] = profile.overhead_ms;
  Json entries = Json::array();
  for (const auto& [key, ms] : profile.layer_ms) {
    Json e;
    e["embed_dim"] = key.first;
    e["ffn_dim"] = key.second;
    e["ms"] = ms;
    entries.push_back(e);
  }
  j["entries"] = entries;
  return j;
}

DeviceProfile profile_from_json(const Json& j) {
  check_schema(j, false);
  DeviceProfile p;
  p.device_name = required<std::string>(j, "device_name");
  p.seq_len = optional_field(j, "seq_len", kDefaultLatencySeqLen);
  p.overhead_ms = optional_field(j, "overhead_ms", 0.0);
  if (!j.contains("entries") || !j.at("entries").is_array()) {
    throw SchemaError("field 'entries' must be an array");
  }
  for (const Json& e : j.at("entries")) {
    p.layer_ms[{required<int>(e, "embed_dim"), required<int>(e, "ffn_dim")}] = required<double>(e, "ms");
  }
  check_profile(p);
  return p;
}

Json budget_to_json(const BudgetSpec& budget) {
  Json j;
  j["metric"] = to_string(budget.metric);
  j["limit"] = budget.limit;
  j["seq_len"] = budget.resolved_seq_len();
  return j;
}

BudgetSpec budget_from_json(const Json& j) {
  BudgetSpec b;
  b.metric = parse_metric(required<std::string>(j, "metric"));
  b.limit = required<double>(j, "limit");
  if (j.contains("seq_len") && !j.at("seq_len").is_null()) b.seq_len = required<int>(j, "seq_len");
  return b;
}

Json search_config_to_json(const SearchConfig& cfg) {
  Json j;
  j["iterations"] = cfg.iterations;
  j["population_size"] = cfg.population_size;
  j["parent_size"] = cfg.parent_size;
  j["budget"] = budget_to_json(cfg.budget);
  j["seed"] = cfg.seed;
  j["init_rejection_cap"] = cfg.init_rejection_cap;
  j["refill_attempt_cap"] = cfg.resolved_refill_cap();
  return j;
}

SearchConfig search_config_from_json(const Json& j, SearchConfig base) {
  check_schema(j, false);
  base.iterations = optional_field(j, "iterations", base.iterations);
  base.population_size = optional_field(j, "population_size", base.population_size);
  base.parent_size = optional_field(j, "parent_size", base.parent_size);
  if (j.contains("budget")) base.budget = budget_from_json(j.at("budget"));
  base.seed = optional_field<std::uint64_t>(j, "seed", base.seed);
  base.init_rejection_cap = optional_field(j, "init_rejection_cap", base.init_rejection_cap);
  base.refill_attempt_cap = optional_field(j, "refill_attempt_cap", base.refill_attempt_cap);
  return base;
}

Json score_to_json(const ScoreBreakdown& score) {
  Json j;
  j["total"] = score.total;
  Json blocks = Json::array();
  for (const auto& b : score.per_block) {
    Json jb;
    jb["gamma_mhsa"] = b.gamma_mhsa;
    jb["gamma_ffn"] = b.gamma_ffn;
    jb["h_mhsa"] = b.h_mhsa;
    jb["h_ffn"] = b.h_ffn;
    jb["block_total"] = b.block_total;
    blocks.push_back(jb);
  }
  j["per_block"] = blocks;
  return j;
}

Json cost_report_to_json(const CostReport& r) {
  Json j;
  Json p;
  p["total"] = r.params_total;
  p["token_embedding"] = r.params.token_embedding;
  p["position_embedding"] = r.params.position_embedding;
  p["input_projection"] = r.params.input_projection;
  p["inter_block_projections"] = r.params.inter_block_projections;
  p["per_block_shared"] = r.params.per_block_shared;
  p["lm_head"] = r.params.lm_head;
  j["params"] = p;
  Json f;
  f["seq_len"] = r.seq_len;
  f["total"] = r.flops_total;
  f["linear_maps"] = r.flops.linear_maps;
  f["attention_maps"] = r.flops.attention_maps;
  j["flops"] = f;
  j["latency_ms"] = r.latency_ms ? Json(*r.latency_ms) : Json(nullptr);
  j["warnings"] = r.warnings;
  j["notes"] = accounting_notes();
  return j;
}

std::string cost_report_table(const CostReport& r) {
  std::ostringstream os;
  char line[128];
  auto row = [&](const char* name, double v, const char* unit) {
    std::snprintf(line, sizeof line, "  %-26s %18.0f  %s\n", name, v, unit);
    os << line;
  };
  os << "parameters\n";
  row("token_embedding", r.params.token_embedding, "");
  row("position_embedding", r.params.position_embedding, "");
  row("input_projection", r.params.input_projection, "");
  row("inter_block_projections", r.params.inter_block_projections, "");
  row("per_block_shared", r.params.per_block_shared, "");
  row("lm_head", r.params.lm_head, "");
  std::snprintf(line, sizeof line, "  %-26s %18lld  (%.2f M)\n", "total",
                static_cast<long long>(r.params_total), r.params_total / 1e6);
  os << line;
  os << "flops (seq_len " << r.seq_len << ")\n";
  row("linear_maps", r.flops.linear_maps, "");
  row("attention_maps", r.flops.attention_maps, "");
  std::snprintf(line, sizeof line, "  %-26s %18lld  (%.2f G)\n", "total",
                static_cast<long long>(r.flops_total), r.flops_total / 1e9);
  os << line;
  if (r.latency_ms) {
    std::snprintf(line, sizeof line, "latency %.3f ms\n", *r.latency_ms);
    os << line;
  }
  for (const auto& w : r.warnings) os << "warning: " << w << '\n';
  for (const auto& n : accounting_notes()) os << "note: " << n << '\n';
  return os.str();
}

Json candidate_to_json(const Candidate& c) {
  Json j;
  j["arch"] = arch_to_json(c.arch);
  Json ratios = Json::array();
  for (const auto& b : c.arch.blocks) ratios.push_back(b.ffn_ratio());
  j["ffn_ratios"] = ratios;
  j["score"] = score_to_json(c.score);
  j["cost_value"] = c.cost_value;
  j["generation"] = c.generation;
  j["fingerprint"] = hex64(fingerprint(c.arch));
  j["parent_fingerprint"] = c.parent_fingerprint ? Json(hex64(*c.parent_fingerprint)) : Json(nullptr);
  return j;
}

Json search_result_to_json(const SearchResult& result) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "entnas.search_result";
  j["config"] = search_config_to_json(result.config);
  j["admitted"] = result.admitted;
  j["best"] = candidate_to_json(result.best);
  Json history = Json::array();
  for (const auto& h : result.history) {
    Json jh;
    jh["generation"] = h.generation;
    jh["best_score"] = h.best_score;
    jh["mean_score"] = h.mean_score;
    jh["best_cost"] = h.best_cost;
    jh["population_size"] = h.population_size;
    jh["unique_archs"] = h.unique_archs;
    jh["attempts"] = h.attempts;
    history.push_back(jh);
  }
  j["history"] = history;
  return j;
}

std::string history_csv(const SearchResult& result) {
  std::string out = "generation,best_score,mean_score,best_cost\n";
  for (const auto& h : result.history) {
    out += std::to_string(h.generation) + ',' + fmt_double(h.best_score) + ',' +
           fmt_double(h.mean_score) + ',' + fmt_double(h.best_cost) + '\n';
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return os.str();
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out) throw IoError("error writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

EntropyTable load_table(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  try {
    return table_from_json(j);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void save_table(const std::filesystem::path& path, const EntropyTable& table) {
  write_json_file(path, table_to_json(table));
}

}  // namespace entnas
