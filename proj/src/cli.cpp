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

#include "entnas/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "entnas/archspace.hpp"
#include "entnas/costmodel.hpp"
#include "entnas/entropy.hpp"
#include "entnas/errors.hpp"
#include "entnas/evosearch.hpp"
#include "entnas/json_io.hpp"
#include "entnas/manifest.hpp"

namespace entnas::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kDirectGate = 0.01;
constexpr std::size_t kVerifySpotChecks = 4;

struct Run {
  RunManifest manifest;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  explicit Run(std::string command) {
    manifest.command = std::move(command);
    manifest.tool_version = ENTNAS_VERSION;
    manifest.started_at = utc_timestamp();
  }

  void input(const fs::path& p) { manifest.input_digests[p.string()] = sha256_file(p); }
  void output(const fs::path& p) { manifest.output_digests[p.string()] = sha256_file(p); }

  // Writes the manifest to `path`, or to stderr when no path is given.
  void finish(const std::string& path) {
    manifest.finished_at = utc_timestamp();
    manifest.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const Json j = manifest_to_json(manifest);
    if (path.empty()) {
      std::cerr << "manifest: " << j.dump() << '\n';
    } else {
      write_json_file(path, j);
    }
  }
};

fs::path cache_dir() {
  if (const char* dir = std::getenv(kCacheDirEnv); dir && *dir) return dir;
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "entnas";
  return fs::path(".entnas-cache");
}

std::vector<ArchConfig> reference_archs() { return {merino_52m(), merino_61m(), merino_64m()}; }

// Cache file name keyed by everything that determines the table's entries.
fs::path default_table_path(const SearchSpaceDef& space, const EntropyConfig& cfg,
                            const TableBuildOptions& opts) {
  EntropyConfig keyed = cfg;
  keyed.alpha_mhsa = keyed.alpha_ffn = keyed.beta = 0.0;
  Json key;
  key["config"] = entropy_config_to_json(keyed);
  key["space"] = space_to_json(space);
  key["embed_proj_dim"] = opts.embed_proj_dim;
  Json extras = Json::array();
  for (const auto& a : opts.extra_archs) extras.push_back(arch_to_json(a));
  key["extra_archs"] = extras;
  return cache_dir() / ("entropy-table-" + sha256_hex(key.dump()).substr(0, 16) + ".json");
}

SearchSpaceDef load_space(Run& run, const std::string& path) {
  if (path.empty()) return SearchSpaceDef::defaults();
  run.input(path);
  return space_from_json(read_json_file(path));
}

ArchConfig preset(const std::string& name) {
  if (name == "merino-52m") return merino_52m();
  if (name == "merino-61m") return merino_61m();
  if (name == "merino-64m") return merino_64m();
  throw SchemaError("unknown preset '" + name + "' (merino-52m, merino-61m, merino-64m)");
}

ArchConfig load_arch(Run& run, const std::string& path, const std::string& preset_name) {
  if (!preset_name.empty()) return preset(preset_name);
  if (path.empty()) throw SchemaError("one of --arch or --preset is required");
  run.input(path);
  return arch_from_json(read_json_file(path));
}

std::optional<DeviceProfile> load_profile(Run& run, const std::string& path) {
  if (path.empty()) return std::nullopt;
  run.input(path);
  return profile_from_json(read_json_file(path));
}

struct EntropyFlags {
  std::string config_file;
  std::optional<double> alpha_mhsa, alpha_ffn, beta;
  std::optional<std::uint64_t> seed;
  std::optional<int> mc_samples;

  void add_to(CLI::App* app, bool table_fields) {
    app->add_option("--entropy-config", config_file, "Entropy configuration JSON")->check(CLI::ExistingFile);
    app->add_option("--alpha-mhsa", alpha_mhsa, "MHSA entropy weight");
    app->add_option("--alpha-ffn", alpha_ffn, "FFN entropy weight");
    app->add_option("--beta", beta, "Effectiveness scaling factor");
    if (table_fields) {
      app->add_option("--table-seed", seed, "Monte-Carlo seed of the table");
      app->add_option("--mc-samples", mc_samples, "Maximum draws per shape")->check(CLI::PositiveNumber);
    }
  }

  // Precedence: flags > config file > `base`.
  EntropyConfig resolve(Run& run, EntropyConfig base) const {
    if (!config_file.empty()) {
      run.input(config_file);
      base = entropy_config_from_json(read_json_file(config_file));
    }
    if (alpha_mhsa) base.alpha_mhsa = *alpha_mhsa;
    if (alpha_ffn) base.alpha_ffn = *alpha_ffn;
    if (beta) base.beta = *beta;
    if (seed) base.seed = *seed;
    if (mc_samples) base.mc_samples = *mc_samples;
    check_config(base);
    return base;
  }
};

struct TableRef {
  std::string path;
  EntropyTable table;
  EntropyConfig cfg;
};

// Loads the table (explicit path, else the cache entry for the default
// configuration) and resolves the scoring config, defaulting to the table's.
TableRef load_table_ref(Run& run, const std::string& path, const EntropyFlags& flags,
                        const SearchSpaceDef& space) {
  TableRef ref;
  ref.path = path;
  if (ref.path.empty()) {
    TableBuildOptions opts;
    opts.extra_archs = reference_archs();
    ref.path = default_table_path(space, flags.resolve(run, EntropyConfig{}), opts).string();
    if (!fs::exists(ref.path)) {
      throw IoError("no entropy table at " + ref.path + "; run 'entnas build-table' or pass --table");
    }
  }
  run.input(ref.path);
  ref.table = load_table(ref.path);
  ref.cfg = flags.resolve(run, ref.table.meta().config);
  ref.table.check_compatible(ref.cfg);
  return ref;
}

struct BudgetFlags {
  std::string metric = "flops";
  double limit = 0.0;
  std::optional<int> seq_len;
  std::string device;

  void add_to(CLI::App* app, bool limit_required) {
    app->add_option("--metric", metric, "params | flops | latency")
        ->check(CLI::IsMember({"params", "flops", "latency"}));
    auto* opt = app->add_option("--limit", limit, "Budget limit C (count, FLOPs or ms)");
    if (limit_required) opt->required();
    app->add_option("--seq-len", seq_len, "Sequence length for FLOPs or latency")->check(CLI::PositiveNumber);
    app->add_option("--device", device, "Device latency profile JSON")->check(CLI::ExistingFile);
  }

  BudgetSpec spec() const {
    BudgetSpec b;
    b.metric = parse_metric(metric);
    b.limit = limit;
    b.seq_len = seq_len;
    return b;
  }
};

struct SearchFlags {
  std::string config_file;
  std::optional<int> iters, pop, parents;
  std::optional<std::uint64_t> seed;
  bool serial = false;

  void add_to(CLI::App* app) {
    app->add_option("--config", config_file, "Search configuration JSON")->check(CLI::ExistingFile);
    app->add_option("--iters", iters, "Refill/truncate cycles T");
    app->add_option("--pop", pop, "Population size M");
    app->add_option("--parents", parents, "Parent size K");
    app->add_option("--seed", seed, "Search seed");
    app->add_flag("--serial", serial, "Use the single-threaded reference schedule");
  }

  SearchConfig resolve(Run& run, const BudgetFlags& budget, CLI::App* app, int threads) const {
    SearchConfig cfg;
    if (!config_file.empty()) {
      run.input(config_file);
      cfg = search_config_from_json(read_json_file(config_file), cfg);
    }
    if (app->count("--metric")) cfg.budget.metric = parse_metric(budget.metric);
    if (app->count("--limit")) cfg.budget.limit = budget.limit;
    if (budget.seq_len) cfg.budget.seq_len = budget.seq_len;
    if (!(cfg.budget.limit > 0.0)) {
      throw SchemaError("a positive budget is required (--limit or a budget in --config)");
    }
    if (iters) cfg.iterations = *iters;
    if (pop) cfg.population_size = *pop;
    if (parents) cfg.parent_size = *parents;
    if (seed) cfg.seed = *seed;
    cfg.threads = threads;
    cfg.mode = serial ? ExecMode::serial : ExecMode::parallel;
    check_search_config(cfg);
    return cfg;
  }
};

void apply_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

Json arch_report(const ArchConfig& arch) {
  Json j;
  j["arch"] = arch_to_json(arch);
  Json ratios = Json::array();
  for (const auto& b : arch.blocks) ratios.push_back(b.ffn_ratio());
  j["ffn_ratios"] = ratios;
  return j;
}

// ---- build-table -------------------------------------------------------

struct BuildTableCmd {
  std::string space_file, out, manifest;
  EntropyFlags entropy;
  bool force = false;
  bool no_presets = false;
  int threads = 0;

  void add(CLI::App& root, std::function<int()>& action) {
    auto* app = root.add_subcommand("build-table", "Precompute the entropy lookup table");
    app->add_option("--space", space_file, "Search space JSON (default space if omitted)")->check(CLI::ExistingFile);
    entropy.add_to(app, true);
    app->add_option("--out", out, "Output path (default: cache directory)");
    app->add_flag("--force", force, "Overwrite an existing table");
    app->add_flag("--no-presets", no_presets, "Do not add the reference architectures' shapes");
    app->add_option("--threads", threads, "OpenMP threads (0 = default)");
    app->add_option("--manifest", manifest, "Manifest path (default: <out>.manifest.json)");
    app->callback([this, &action] { action = [this] { return run(); }; });
  }

  int run() {
    Run r("build-table");
    apply_threads(threads);
    const SearchSpaceDef space = load_space(r, space_file);
    const EntropyConfig cfg = entropy.resolve(r, EntropyConfig{});
    TableBuildOptions opts;
    if (!no_presets) opts.extra_archs = reference_archs();
    const fs::path path = out.empty() ? default_table_path(space, cfg, opts) : fs::path(out);
    const std::string manifest_path = manifest.empty() ? path.string() + ".manifest.json" : manifest;
    r.manifest.seed = cfg.seed;
    r.manifest.resolved_config["space"] = space_to_json(space);
    r.manifest.resolved_config["entropy"] = entropy_config_to_json(cfg);
    r.manifest.resolved_config["out"] = path.string();
    r.manifest.resolved_config["threads"] = threads;
    r.manifest.resolved_config["reference_shapes"] = !no_presets;

    if (fs::exists(path) && !force) {
      EntropyTable existing;
      try {
        existing = load_table(path);
      } catch (const SchemaError& e) {
        throw SchemaError(std::string("existing table is unreadable (use --force to rebuild): ") + e.what());
      }
      const TableMeta& m = existing.meta();
      const bool same = same_table_inputs(m.config, cfg) && m.space && *m.space == space &&
                        m.embed_proj_dim == opts.embed_proj_dim && m.extra_archs == opts.extra_archs;
      if (!same) {
        throw SchemaError("table at " + path.string() +
                          " was built with different settings; use --force to overwrite");
      }
      // Spot-check the cheapest entries; the build is deterministic.
      std::size_t checked = 0;
      for (const auto& e : existing.entries()) {
        if (checked++ == kVerifySpotChecks) break;
        const double v = expected_matrix_entropy(e.shape.rows, e.shape.cols, cfg,
                                                 shape_seed(cfg.seed, e.shape.rows, e.shape.cols));
        if (v != e.value) {
          std::cerr << "verification failed at (" << e.shape.rows << ", " << e.shape.cols << ")\n";
          return kFailure;
        }
      }
      r.output(path);
      r.manifest.resolved_config["action"] = "verified";
      r.finish(manifest_path);
      std::cout << "verified " << path.string() << " (" << existing.size() << " entries)\n";
      return kOk;
    }

    opts.build_timestamp = utc_timestamp();
    const EntropyTable table = build_table(space, cfg, opts, threads);
    save_table(path, table);
    r.output(path);
    r.manifest.resolved_config["action"] = "built";
    r.finish(manifest_path);
    std::cout << "wrote " << path.string() << " (" << table.size() << " entries)\n";
    return kOk;
  }
};

// ---- score -------------------------------------------------------------

struct ScoreCmd {
  std::string arch_file, preset_name, table_file, space_file, manifest;
  EntropyFlags entropy;
  bool direct = false;
  std::uint64_t direct_seed = 1;
  int threads = 0;

  void add(CLI::App& root, std::function<int()>& action) {
    auto* app = root.add_subcommand("score", "Score an architecture with the entropy table");
    app->add_option("--arch", arch_file, "Architecture JSON")->check(CLI::ExistingFile);
    app->add_option("--preset", preset_name, "merino-52m | merino-61m | merino-64m");
    app->add_option("--table", table_file, "Entropy table (default: cache)");
    app->add_option("--space", space_file, "Space used to locate the cached table")->check(CLI::ExistingFile);
    entropy.add_to(app, false);
    app->add_flag("--direct", direct, "Also compute every entropy term afresh and compare");
    app->add_option("--direct-seed", direct_seed, "Seed of the direct computation");
    app->add_option("--threads", threads, "OpenMP threads (0 = default)");
    app->add_option("--manifest", manifest, "Manifest path (default: stderr)");
    app->callback([this, &action] { action = [this] { return run(); }; });
  }

  int run() {
    Run r("score");
    apply_threads(threads);
    const ArchConfig arch = load_arch(r, arch_file, preset_name);
    const SearchSpaceDef space = load_space(r, space_file);
    const TableRef ref = load_table_ref(r, table_file, entropy, space);
    const ScoreBreakdown score = score_arch(arch, ref.cfg, ref.table);

    Json out = arch_report(arch);
    out["score"] = score_to_json(score);
    bool within = true;
    if (direct) {
      Rng rng(direct_seed);
      const ScoreBreakdown d = score_arch_direct(arch, ref.cfg, rng);
      const double rel = std::abs(score.total - d.total) / std::abs(d.total);
      within = rel <= kDirectGate;
      out["direct"] = {{"total", d.total}, {"relative_difference", rel}, {"within_gate", within}};
    }
    std::cout << out.dump(2) << '\n';
    r.manifest.resolved_config["entropy"] = entropy_config_to_json(ref.cfg);
    r.manifest.resolved_config["table"] = ref.path;
    r.manifest.resolved_config["direct"] = direct;
    r.finish(manifest);
    return within ? kOk : kFailure;
  }
};

// ---- search ------------------------------------------------------------

struct SearchCmd {
  std::string space_file, table_file, out_dir = "search-out";
  EntropyFlags entropy;
  BudgetFlags budget;
  SearchFlags search;
  int threads = 0;
  CLI::App* app = nullptr;

  void add(CLI::App& root, std::function<int()>& action) {
    app = root.add_subcommand("search", "Evolutionary search for the highest-entropy architecture");
    app->add_option("--space", space_file, "Search space JSON")->check(CLI::ExistingFile);
    app->add_option("--table", table_file, "Entropy table (default: cache)");
    entropy.add_to(app, false);
    budget.add_to(app, false);
    search.add_to(app);
    app->add_option("--out-dir", out_dir, "Directory for result files");
    app->add_option("--threads", threads, "OpenMP threads (0 = default)");
    app->callback([this, &action] { action = [this] { return run(); }; });
  }

  int run() {
    Run r("search");
    apply_threads(threads);
    const SearchSpaceDef space = load_space(r, space_file);
    const SearchConfig cfg = search.resolve(r, budget, app, threads);
    const std::optional<DeviceProfile> profile = load_profile(r, budget.device);
    if (cfg.budget.metric == Metric::latency && !profile) {
      throw MissingProfileError("--metric latency requires --device");
    }
    if (cfg.budget.metric != Metric::params && cfg.budget.resolved_seq_len() > 2048) {
      throw SeqLenError("seq_len exceeds max_positions (2048)");
    }
    const TableRef ref = load_table_ref(r, table_file, entropy, space);
    SearchProblem problem{space, table_scorer(ref.cfg, ref.table), profile ? &*profile : nullptr};

    const SearchResult result = ea_search(problem, cfg);

    const fs::path dir(out_dir);
    const fs::path best = dir / "best_arch.json", res = dir / "search_result.json",
                   csv = dir / "history.csv";
    write_json_file(best, arch_to_json(result.best.arch));
    write_json_file(res, search_result_to_json(result));
    write_text_file(csv, history_csv(result));
    r.output(best);
    r.output(res);
    r.output(csv);
    r.manifest.seed = cfg.seed;
    r.manifest.resolved_config["space"] = space_to_json(space);
    r.manifest.resolved_config["search"] = search_config_to_json(cfg);
    r.manifest.resolved_config["entropy"] = entropy_config_to_json(ref.cfg);
    r.manifest.resolved_config["table"] = ref.path;
    r.manifest.resolved_config["device"] = budget.device;
    r.manifest.resolved_config["threads"] = threads;
    r.manifest.resolved_config["serial"] = search.serial;
    r.manifest.resolved_config["search_wall_time_s"] = result.wall_time_s;
    r.finish((dir / "manifest.json").string());

    std::cout << "best score " << result.best.score.total << " at cost " << result.best.cost_value
              << " (" << encode(result.best.arch) << ")\n";
    return kOk;
  }
};

// ---- cost --------------------------------------------------------------

struct CostCmd {
  std::string arch_file, preset_name, metric, device, format = "json", manifest;
  std::optional<int> seq_len;
  std::optional<double> limit;

  void add(CLI::App& root, std::function<int()>& action) {
    auto* app = root.add_subcommand("cost", "Parameter, FLOPs and latency report");
    app->add_option("--arch", arch_file, "Architecture JSON")->check(CLI::ExistingFile);
    app->add_option("--preset", preset_name, "merino-52m | merino-61m | merino-64m");
    app->add_option("--metric", metric, "params | flops | latency")
        ->check(CLI::IsMember({"params", "flops", "latency"}));
    app->add_option("--seq-len", seq_len, "Sequence length")->check(CLI::PositiveNumber);
    app->add_option("--device", device, "Device latency profile JSON")->check(CLI::ExistingFile);
    app->add_option("--limit", limit, "Budget limit; adds a feasible field");
    app->add_option("--format", format, "json | table")->check(CLI::IsMember({"json", "table"}));
    app->add_option("--manifest", manifest, "Manifest path (default: stderr)");
    app->callback([this, &action] { action = [this] { return run(); }; });
  }

  int run() {
    Run r("cost");
    const ArchConfig arch = load_arch(r, arch_file, preset_name);
    const std::optional<DeviceProfile> profile = load_profile(r, device);
    BudgetSpec budget;
    if (!metric.empty()) budget.metric = parse_metric(metric);
    budget.seq_len = seq_len;
    budget.limit = limit.value_or(0.0);
    if (budget.metric == Metric::latency && !profile) {
      throw MissingProfileError("--metric latency requires --device");
    }

    const int flops_seq = budget.metric == Metric::latency ? kDefaultFlopsSeqLen : budget.resolved_seq_len();
    CostReport report = count_params(arch);
    const CostReport flops = count_flops(arch, seq_len.value_or(flops_seq));
    report.flops = flops.flops;
    report.flops_total = flops.flops_total;
    report.seq_len = flops.seq_len;
    if (profile) report.latency_ms = estimate_latency(arch, *profile);

    Json out = arch_report(arch);
    std::optional<CostValue> value;
    if (!metric.empty()) {
      value = compute_cost(arch, budget, profile ? &*profile : nullptr);
      report.warnings.insert(report.warnings.end(), value->warnings.begin(), value->warnings.end());
    }
    out["cost"] = cost_report_to_json(report);
    if (value) {
      out["metric"] = metric;
      out["value"] = value->value;
      if (limit) {
        out["limit"] = *limit;
        out["feasible"] = value->feasible;
      }
    }
    if (format == "table") {
      std::cout << encode(arch) << '\n' << cost_report_table(report);
      if (value && limit) std::cout << metric << " " << value->value << (value->feasible ? " <= " : " > ") << *limit << '\n';
    } else {
      std::cout << out.dump(2) << '\n';
    }
    r.finish(manifest);
    return kOk;
  }
};

// ---- baseline ----------------------------------------------------------

struct BaselineCmd {
  std::string kind, space_file, table_file, manifest;
  EntropyFlags entropy;
  BudgetFlags budget;
  SearchFlags search;
  int threads = 0;
  CLI::App* app = nullptr;

  void add(CLI::App& root, std::function<int()>& action) {
    app = root.add_subcommand("baseline", "Baseline searchers for comparison with the EA");
    app->add_option("--kind", kind, "random | scale-depth | scale-width | decoder-param | compare")
        ->required()
        ->check(CLI::IsMember({"random", "scale-depth", "scale-width", "decoder-param", "compare"}));
    app->add_option("--space", space_file, "Search space JSON")->check(CLI::ExistingFile);
    app->add_option("--table", table_file, "Entropy table (default: cache)");
    entropy.add_to(app, false);
    budget.add_to(app, false);
    search.add_to(app);
    app->add_option("--threads", threads, "OpenMP threads (0 = default)");
    app->add_option("--manifest", manifest, "Manifest path (default: stderr)");
    app->callback([this, &action] { action = [this] { return run(); }; });
  }

  int run() {
    Run r("baseline");
    apply_threads(threads);
    const SearchSpaceDef space = load_space(r, space_file);
    const SearchConfig cfg = search.resolve(r, budget, app, threads);
    const std::optional<DeviceProfile> profile = load_profile(r, budget.device);
    if (cfg.budget.metric == Metric::latency && !profile) {
      throw MissingProfileError("--metric latency requires --device");
    }
    const TableRef ref = load_table_ref(r, table_file, entropy, space);
    const DeviceProfile* prof = profile ? &*profile : nullptr;
    const Scorer entropy_score = table_scorer(ref.cfg, ref.table);

    auto report = [&](const std::string& name, const ArchConfig& arch) {
      Json j = arch_report(arch);
      j["kind"] = name;
      j["score"] = score_to_json(entropy_score(arch));
      j["cost_value"] = compute_cost(arch, cfg.budget, prof).value;
      return j;
    };
    auto run_kind = [&](const std::string& k) -> Json {
      if (k == "scale-depth") return report(k, naive_scaling_baseline(ScalingKind::depth, cfg.budget, space, prof));
      if (k == "scale-width") return report(k, naive_scaling_baseline(ScalingKind::width, cfg.budget, space, prof));
      if (k == "random") {
        return report(k, random_search_baseline({space, entropy_score, prof}, cfg).best.arch);
      }
      if (k == "decoder-param") {
        const SearchResult res = ea_search({space, decoder_param_scorer(), prof}, cfg);
        Json j = report(k, res.best.arch);
        j["decoder_param_proxy"] = res.best.score.total;
        return j;
      }
      return report("entropy-ea", ea_search({space, entropy_score, prof}, cfg).best.arch);
    };

    Json out;
    if (kind == "compare") {
      Json rows = Json::array();
      for (const char* k : {"entropy-ea", "random", "scale-depth", "scale-width", "decoder-param"}) {
        rows.push_back(run_kind(k));
      }
      const double ea = rows[0]["score"]["total"].get<double>();
      bool dominates = true;
      for (std::size_t i = 1; i < rows.size(); ++i) {
        dominates = dominates && ea >= rows[i]["score"]["total"].get<double>();
      }
      out["budget"] = budget_to_json(cfg.budget);
      out["results"] = rows;
      out["ea_at_least_all_baselines"] = dominates;
    } else {
      out = run_kind(kind);
      out["budget"] = budget_to_json(cfg.budget);
    }
    std::cout << out.dump(2) << '\n';
    r.manifest.seed = cfg.seed;
    r.manifest.resolved_config["kind"] = kind;
    r.manifest.resolved_config["space"] = space_to_json(space);
    r.manifest.resolved_config["search"] = search_config_to_json(cfg);
    r.manifest.resolved_config["entropy"] = entropy_config_to_json(ref.cfg);
    r.manifest.resolved_config["table"] = ref.path;
    r.finish(manifest);
    return kOk;
  }
};

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"entnas: training-free entropy-driven transformer decoder search"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ENTNAS_VERSION);
  std::function<int()> action;
  BuildTableCmd build_table_cmd;
  ScoreCmd score_cmd;
  SearchCmd search_cmd;
  CostCmd cost_cmd;
  BaselineCmd baseline_cmd;
  build_table_cmd.add(app, action);
  score_cmd.add(app, action);
  search_cmd.add(app, action);
  cost_cmd.add(app, action);
  baseline_cmd.add(app, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return action ? action() : kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const InfeasibleBudgetError& e) {
    std::cerr << "infeasible budget: " << e.what() << '\n';
    return kFailure;
  } catch (const RejectionLimitError& e) {
    std::cerr << "search failure: " << e.what() << '\n';
    return kFailure;
  } catch (const DecompositionError& e) {
    std::cerr << "search failure: " << e.what() << '\n';
    return kFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace entnas::cli
