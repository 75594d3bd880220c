#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "entnas/errors.hpp"
#include "entnas/json_io.hpp"
#include "entnas/manifest.hpp"

using namespace entnas;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "entnas_test_json_io";
  fs::create_directories(dir);
  return dir;
}

void write_raw(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

// write -> read -> write must reproduce the first file byte for byte.
template <class To, class From>
void check_fixed_point(const std::string& name, const Json& first, To to_json, From from_json) {
  const fs::path a = scratch_dir() / (name + ".a.json");
  const fs::path b = scratch_dir() / (name + ".b.json");
  write_json_file(a, first);
  write_json_file(b, to_json(from_json(read_json_file(a))));
  CHECK(read_text_file(a) == read_text_file(b));
  CHECK(read_text_file(a).back() == '\n');
}

SearchSpaceDef tiny_space() {
  SearchSpaceDef s;
  s.embed_choices = {64, 128};
  s.ffn_choices = {128};
  s.depth_choices = {1, 2};
  s.num_blocks = 2;
  return s;
}

}  // namespace

TEST_CASE("every document format is a write/read/write fixed point") {
  check_fixed_point("arch", arch_to_json(merino_64m()), arch_to_json, arch_from_json);
  ArchConfig odd = merino_52m();
  odd.param_sharing = false;
  odd.vocab_size = 32000;
  check_fixed_point("arch_odd", arch_to_json(odd), arch_to_json, arch_from_json);
  check_fixed_point("space", space_to_json(SearchSpaceDef::defaults()), space_to_json, space_from_json);

  EntropyConfig cfg;
  cfg.alpha_ffn = 0.3;
  cfg.beta = 0.1;
  cfg.seed = 1ULL << 63;
  cfg.estimator = Estimator::plain;
  check_fixed_point("entropy_config", entropy_config_to_json(cfg), entropy_config_to_json,
                    entropy_config_from_json);

  DeviceProfile p;
  p.device_name = "board";
  p.overhead_ms = 0.1 + 0.2;
  p.layer_ms[{64, 128}] = 1.0 / 3.0;
  p.layer_ms[{128, 128}] = 2.5;
  check_fixed_point("profile", profile_to_json(p), profile_to_json, profile_from_json);

  check_fixed_point("budget", budget_to_json({Metric::latency, 48.5, {}}), budget_to_json,
                    budget_from_json);

  SearchConfig sc;
  sc.iterations = 7;
  sc.budget = {Metric::params, 5e7, {}};
  check_fixed_point("search_config", search_config_to_json(sc), search_config_to_json,
                    [](const Json& j) { return search_config_from_json(j); });

  TableBuildOptions opts;
  opts.extra_archs = {make_arch({{64, 192, 1}})};
  opts.build_timestamp = "2026-01-01T00:00:00Z";
  const EntropyTable table = build_table(tiny_space(), EntropyConfig{}, opts);
  check_fixed_point("table", table_to_json(table), table_to_json, table_from_json);
}

TEST_CASE("table values survive a file round trip exactly") {
  const EntropyTable table = build_table(tiny_space(), EntropyConfig{});
  const fs::path p = scratch_dir() / "table.json";
  save_table(p, table);
  const EntropyTable back = load_table(p);
  REQUIRE(back.size() == table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    CHECK(back.entries()[i].shape == table.entries()[i].shape);
    CHECK(back.entries()[i].value == table.entries()[i].value);
  }
  CHECK(back.meta().config == table.meta().config);
  CHECK(back.meta().space == table.meta().space);
}

TEST_CASE("architecture input forms") {
  const Json j = Json::parse(R"({"schema": 1, "blocks": [
      {"embed_dim": 640, "ffn_ratio": 1.5, "depth": 3},
      {"embed_dim": 896, "ffn_dim": 1344, "depth": 3}]})");
  const ArchConfig a = arch_from_json(j);
  CHECK(a.blocks[0].ffn_dim == 960);
  CHECK(a.blocks[1].ffn_dim == 1344);
  CHECK(a.embed_proj_dim == 768);
  CHECK(a.param_sharing);
  CHECK_THROWS_AS(arch_from_json(Json::parse(R"({"blocks": []})")), SchemaError);
  CHECK_THROWS_AS(arch_from_json(Json::parse(R"({"schema": 2, "blocks": []})")), SchemaError);
  CHECK_THROWS_AS(
      arch_from_json(Json::parse(R"({"schema": 1, "blocks": [{"embed_dim": 64, "depth": 1}]})")),
      SchemaError);
  CHECK_THROWS_AS(arch_from_json(Json::parse(
                      R"({"schema": 1, "blocks": [{"embed_dim": "wide", "ffn_dim": 1, "depth": 1}]})")),
                  SchemaError);
  // Decreasing widths are structurally invalid.
  CHECK_THROWS_AS(arch_from_json(Json::parse(R"({"schema": 1, "blocks": [
      {"embed_dim": 128, "ffn_dim": 128, "depth": 1},
      {"embed_dim": 64, "ffn_dim": 128, "depth": 1}]})")),
                  SchemaError);
}

TEST_CASE("space ranges expand") {
  const Json j = Json::parse(R"({"schema": 1,
      "embed_choices": {"min": 64, "max": 1024, "step": 64},
      "ffn_choices": {"min": 128, "max": 4096, "step": 128},
      "depth_choices": [1, 2, 3, 4]})");
  CHECK(space_from_json(j) == SearchSpaceDef::defaults());
  Json bad = j;
  bad["embed_choices"] = Json::parse(R"({"min": 64, "max": 32, "step": 64})");
  CHECK_THROWS_AS(space_from_json(bad), SchemaError);
}

TEST_CASE("entropy config rejects unsupported choices") {
  Json j = entropy_config_to_json(EntropyConfig{});
  j["init_rule"] = "kaiming";
  CHECK_THROWS_AS(entropy_config_from_json(j), SchemaError);
  j = entropy_config_to_json(EntropyConfig{});
  j["estimator"] = "magic";
  CHECK_THROWS_AS(entropy_config_from_json(j), SchemaError);
  CHECK(entropy_config_from_json(Json::parse(R"({"schema": 1})")) == EntropyConfig{});
}

TEST_CASE("corrupt tables are refused") {
  const Json good = table_to_json(build_table(tiny_space(), EntropyConfig{}));
  Json j = good;
  j["kind"] = "something_else";
  CHECK_THROWS_AS(table_from_json(j), SchemaError);
  j = good;
  j["entries"][0] = Json::parse(R"([64, "x", 1.0])");
  CHECK_THROWS_AS(table_from_json(j), SchemaError);
  j = good;
  j["entries"][0][2] = -1.0;
  CHECK_THROWS_AS(table_from_json(j), SchemaError);
  j = good;
  j["entries"].push_back(j["entries"][0]);
  j["meta"]["entry_count"] = j["entries"].size();
  CHECK_THROWS_AS(table_from_json(j), SchemaError);
  j = good;
  j["entries"].erase(0);
  CHECK_THROWS_AS(table_from_json(j), SchemaError);

  const fs::path p = scratch_dir() / "truncated.json";
  const std::string text = good.dump(2);
  write_raw(p, text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(load_table(p), SchemaError);
  CHECK_THROWS_AS(load_table(scratch_dir() / "does_not_exist.json"), IoError);
}

TEST_CASE("profile documents") {
  const Json j = Json::parse(R"({"device_name": "nano", "seq_len": 128, "overhead_ms": 1.5,
      "entries": [{"embed_dim": 512, "ffn_dim": 512, "ms": 3.0}]})");
  const DeviceProfile p = profile_from_json(j);
  CHECK(p.device_name == "nano");
  CHECK(p.layer_ms.at({512, 512}) == 3.0);
  Json bad = j;
  bad.erase("entries");
  CHECK_THROWS_AS(profile_from_json(bad), SchemaError);
}

TEST_CASE("search outputs") {
  SearchResult r;
  r.best.arch = make_arch({{64, 128, 2}});
  r.best.score.total = 1.0 / 3.0;
  r.best.parent_fingerprint = 0xabcULL;
  r.history.push_back({0, 1.0 / 3.0, 0.25, 123.0, 8, 5, 0});
  r.history.push_back({1, 0.5, 0.3, 1e10, 8, 6, 40});
  const Json j = search_result_to_json(r);
  CHECK(j["kind"] == "entnas.search_result");
  CHECK(j["best"]["ffn_ratios"][0] == 2.0);
  CHECK(j["best"]["fingerprint"].get<std::string>().size() == 16);
  CHECK(j["best"]["parent_fingerprint"] == "0000000000000abc");
  CHECK(j["history"].size() == 2);
  CHECK(history_csv(r) ==
        "generation,best_score,mean_score,best_cost\n"
        "0,0.33333333333333331,0.25,123\n"
        "1,0.5,0.29999999999999999,10000000000\n");
}

TEST_CASE("cost reports list their accounting notes") {
  CostReport r = count_params(merino_52m());
  const CostReport f = count_flops(merino_52m(), 1024);
  r.flops = f.flops;
  r.flops_total = f.flops_total;
  r.seq_len = 1024;
  const Json j = cost_report_to_json(r);
  CHECK(j["params"]["total"] == r.params_total);
  CHECK(j["flops"]["total"] == r.flops_total);
  CHECK(j["notes"].size() == accounting_notes().size());
  const std::string table = cost_report_table(r);
  CHECK(table.find("note: ") != std::string::npos);
  CHECK(table.find("lm_head") != std::string::npos);
}

TEST_CASE("digests and manifests") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const fs::path p = scratch_dir() / "digest.txt";
  write_raw(p, "abc");
  CHECK(sha256_file(p) == sha256_hex("abc"));
  CHECK_THROWS_AS(sha256_file(scratch_dir() / "missing.txt"), IoError);
  RunManifest m;
  m.command = "search";
  m.seed = 3;
  m.input_digests["t.json"] = sha256_hex("abc");
  const Json j = manifest_to_json(m);
  CHECK(j["kind"] == "entnas.run_manifest");
  CHECK(j["seed"] == 3);
  const std::string ts = utc_timestamp();
  CHECK(ts.size() == 20);
  CHECK(ts.back() == 'Z');
}
