#include <doctest.h>

#include <cmath>

#include "entnas/costmodel.hpp"
#include "entnas/errors.hpp"
#include "oracles.hpp"

using namespace entnas;

namespace {

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * target; }

DeviceProfile grid_profile(double (*ms)(int, int)) {
  DeviceProfile p;
  p.device_name = "test";
  for (int e : {64, 128, 256}) {
    for (int f : {128, 256, 512}) p.layer_ms[{e, f}] = ms(e, f);
  }
  return p;
}

ArchConfig scaled_depth(ArchConfig arch, int factor) {
  for (auto& b : arch.blocks) b.depth *= factor;
  return arch;
}

int width_changes(const ArchConfig& arch) {
  int n = 0;
  for (std::size_t j = 0; j + 1 < arch.blocks.size(); ++j) {
    n += arch.blocks[j].embed_dim != arch.blocks[j + 1].embed_dim;
  }
  return n;
}

}  // namespace

TEST_CASE("params of the reference structures") {
  CHECK(within(double(count_params(merino_52m()).params_total), 52e6, 0.10));
  CHECK(within(double(count_params(merino_61m()).params_total), 61e6, 0.10));
  CHECK(within(double(count_params(merino_64m()).params_total), 64e6, 0.10));
}

TEST_CASE("flops of the reference structures") {
  const double f52 = double(count_flops(merino_52m(), 1024).flops_total);
  const double f61 = double(count_flops(merino_61m(), 1024).flops_total);
  const double f64 = double(count_flops(merino_64m(), 1024).flops_total);
  CHECK(within(f52, 60e9, 0.20));
  CHECK(within(f61, 110e9, 0.20));
  CHECK(within(f64, 160e9, 0.20));
  CHECK(f52 < f61);
  CHECK(f61 < f64);
}

TEST_CASE("params and flops match tensor and matmul enumeration") {
  Rng rng(4);
  const SearchSpaceDef space = SearchSpaceDef::defaults();
  for (int i = 0; i < 200; ++i) {
    ArchConfig arch = sample_uniform(space, rng);
    arch.param_sharing = (i % 2 == 0);
    const CostReport p = count_params(arch);
    CHECK(p.params_total == oracle::params_by_enumeration(arch));
    CHECK(p.params_total == p.params.total());
    const int n = 1 + static_cast<int>(uniform_index(rng, 2048));
    const CostReport f = count_flops(arch, n);
    CHECK(f.flops_total == oracle::flops_by_enumeration(arch, n));
    CHECK(f.flops_total == f.flops.total());
  }
  for (const ArchConfig& arch : {merino_52m(), merino_61m(), merino_64m()}) {
    CHECK(count_params(arch).params_total == oracle::params_by_enumeration(arch));
    CHECK(count_flops(arch, 1024).flops_total == oracle::flops_by_enumeration(arch, 1024));
  }
}

TEST_CASE("breakdown of a small architecture") {
  ArchConfig arch = make_arch({{64, 128, 2}, {128, 256, 1}});
  const ParamBreakdown p = count_params(arch).params;
  CHECK(p.token_embedding == 50257LL * 768);
  CHECK(p.position_embedding == 2048LL * 768);
  CHECK(p.input_projection == 768LL * 64);
  CHECK(p.lm_head == 128LL * 768);
  CHECK(p.inter_block_projections == 64LL * 128);
  CHECK(p.per_block_shared == layer_params(64, 128) + layer_params(128, 256));
  CHECK(layer_params(64, 128) == 4 * 64 * 64 + 2 * 64 * 128 + 4 * 64 + 128 + 64 + 4 * 64);
  const FlopBreakdown f = count_flops(arch, 10).flops;
  CHECK(f.linear_maps == 2 * 10 * (2 * layer_matrix_params(64, 128) + layer_matrix_params(128, 256)) +
                             2 * 10 * 64 * 128);
  CHECK(f.attention_maps == 4 * 100 * (2 * 64 + 128));
}

TEST_CASE("sharing triples matrix params of a three-layer block") {
  ArchConfig arch = make_arch({{64, 128, 3}});
  arch.vocab_size = 0;
  arch.max_positions = 0;
  arch.embed_proj_dim = 0;
  arch.param_sharing = true;
  const CostReport on = count_params(arch);
  arch.param_sharing = false;
  const CostReport off = count_params(arch);
  CHECK(off.params_total == 3 * on.params_total);
  CHECK(off.params.per_block_shared == 3 * on.params.per_block_shared);
}

TEST_CASE("flops are linear in depth and unaffected by sharing") {
  for (const ArchConfig& arch : {merino_52m(), merino_61m(), merino_64m()}) {
    const ArchConfig doubled = scaled_depth(arch, 2);
    // Inter-block projections do not scale with depth; these structures only
    // change width where the next block is wider, so compare the layer part.
    const FlopBreakdown a = count_flops(arch, 1024).flops;
    const FlopBreakdown b = count_flops(doubled, 1024).flops;
    CHECK(b.attention_maps == 2 * a.attention_maps);
    ArchConfig unshared = arch;
    unshared.param_sharing = false;
    CHECK(count_flops(unshared, 1024).flops_total == count_flops(arch, 1024).flops_total);
  }
  // Uniform width: no projections, so the total doubles exactly.
  const ArchConfig flat = make_arch({{256, 512, 1}, {256, 1024, 2}});
  CHECK(count_flops(scaled_depth(flat, 2), 512).flops_total ==
        2 * count_flops(flat, 512).flops_total);
}

TEST_CASE("params and flops are monotone in every field") {
  const SearchSpaceDef space = SearchSpaceDef::defaults();
  Rng rng(12);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    const ArchConfig base = sample_uniform(space, rng);
    const std::size_t j = uniform_index(rng, base.blocks.size());
    for (int field = 0; field < 3; ++field) {
      ArchConfig bigger = base;
      BlockSpec& b = bigger.blocks[j];
      if (field == 0) b.embed_dim += 64;
      if (field == 1) b.ffn_dim += 128;
      if (field == 2) b.depth += 1;
      if (!validate(bigger, space).ok()) continue;
      // Widening a block up to its neighbour's width drops the projection
      // between them; covered separately below.
      if (width_changes(bigger) < width_changes(base)) continue;
      ++checked;
      CHECK(count_params(bigger).params_total >= count_params(base).params_total);
      CHECK(count_flops(bigger, 1024).flops_total >= count_flops(base, 1024).flops_total);
    }
  }
  CHECK(checked > 300);
}

TEST_CASE("merging two widths removes their projection") {
  // 960 -> 1024 makes blocks 0 and 1 equal: +4 * (1024^2 - 960^2) + ... in the
  // shared layer, -960 * 1024 in projections.
  const ArchConfig base = make_arch({{960, 1024, 1}, {1024, 1024, 1}});
  const ArchConfig merged = make_arch({{1024, 1024, 1}, {1024, 1024, 1}});
  const ParamBreakdown a = count_params(base).params;
  const ParamBreakdown b = count_params(merged).params;
  CHECK(a.inter_block_projections == 960 * 1024);
  CHECK(b.inter_block_projections == 0);
  CHECK(b.per_block_shared > a.per_block_shared);
  CHECK(count_params(merged).params_total < count_params(base).params_total);
  CHECK(count_params(merged).params_total == oracle::params_by_enumeration(merged));
}

TEST_CASE("seq_len bounds") {
  CHECK_THROWS_AS(count_flops(merino_52m(), 0), SeqLenError);
  CHECK_THROWS_AS(count_flops(merino_52m(), 2049), SeqLenError);
  CHECK_NOTHROW(count_flops(merino_52m(), 2048));
  BudgetSpec b{Metric::flops, 1e12, 4096};
  CHECK_THROWS_AS(compute_cost(merino_52m(), b), SeqLenError);
  CHECK(BudgetSpec{Metric::flops, 1.0, {}}.resolved_seq_len() == 1024);
  CHECK(BudgetSpec{Metric::latency, 1.0, {}}.resolved_seq_len() == 128);
}

TEST_CASE("latency from a constant profile") {
  DeviceProfile p = grid_profile([](int, int) { return 1.5; });
  const ArchConfig arch = make_arch({{64, 128, 2}, {128, 512, 3}, {256, 256, 1}});
  CHECK(estimate_latency(arch, p) == doctest::Approx(1.5 * 6));
  p.overhead_ms = 2.0;
  CHECK(estimate_latency(arch, p) == doctest::Approx(1.5 * 6 + 2.0));
}

TEST_CASE("latency on grid keys and at bilinear midpoints") {
  const DeviceProfile p = grid_profile([](int e, int f) { return e * 0.01 + f * f * 1e-5; });
  const ArchConfig on_grid = make_arch({{64, 256, 2}, {256, 512, 1}});
  CHECK(estimate_latency(on_grid, p) == 2 * p.layer_ms.at({64, 256}) + p.layer_ms.at({256, 512}));
  const double mid = layer_latency(p, 192, 384);
  const double mean = (p.layer_ms.at({128, 256}) + p.layer_ms.at({128, 512}) +
                       p.layer_ms.at({256, 256}) + p.layer_ms.at({256, 512})) / 4;
  CHECK(mid == doctest::Approx(mean));
  // Interpolation along one axis only.
  CHECK(layer_latency(p, 96, 128) ==
        doctest::Approx((p.layer_ms.at({64, 128}) + p.layer_ms.at({128, 128})) / 2));
  CHECK_THROWS_AS(layer_latency(p, 512, 256), OutOfGridError);
  CHECK_THROWS_AS(layer_latency(p, 64, 64), OutOfGridError);
  DeviceProfile holed = p;
  holed.layer_ms.erase({256, 512});
  CHECK_THROWS_AS(layer_latency(holed, 192, 384), OutOfGridError);
}

TEST_CASE("profile validation") {
  DeviceProfile p = grid_profile([](int, int) { return 1.0; });
  CHECK_NOTHROW(check_profile(p));
  p.layer_ms[{64, 128}] = -1.0;
  CHECK_THROWS_AS(check_profile(p), SchemaError);
  p = grid_profile([](int, int) { return 1.0; });
  p.overhead_ms = -0.5;
  CHECK_THROWS_AS(check_profile(p), SchemaError);
}

TEST_CASE("compute_cost dispatch and feasibility") {
  CHECK(compute_cost(merino_52m(), {Metric::flops, 60e9 * 1.2, 1024}).feasible);
  CHECK_FALSE(compute_cost(merino_52m(), {Metric::flops, 0.0, {}}).feasible);
  CHECK_FALSE(compute_cost(merino_52m(), {Metric::params, 0.0, {}}).feasible);
  const CostValue params = compute_cost(merino_61m(), {Metric::params, 70e6, {}});
  CHECK(params.value == double(count_params(merino_61m()).params_total));
  CHECK(params.feasible);
  CHECK_THROWS_AS(compute_cost(merino_52m(), {Metric::latency, 10.0, {}}), MissingProfileError);

  DeviceProfile p = grid_profile([](int, int) { return 1.0; });
  const ArchConfig arch = make_arch({{64, 128, 1}});
  CostValue lat = compute_cost(arch, {Metric::latency, 1.0, {}}, &p);
  CHECK(lat.feasible);
  CHECK(lat.warnings.empty());
  lat = compute_cost(arch, {Metric::latency, 1.0, 256}, &p);
  CHECK(lat.warnings.size() == 1);
  CHECK_FALSE(compute_cost(arch, {Metric::latency, 0.99, {}}, &p).feasible);
}

TEST_CASE("shrinking depth never breaks feasibility") {
  const SearchSpaceDef space = SearchSpaceDef::defaults();
  Rng rng(31);
  for (int i = 0; i < 500; ++i) {
    const ArchConfig arch = sample_uniform(space, rng);
    const Metric m = i % 2 ? Metric::params : Metric::flops;
    const double v = compute_cost(arch, {m, 1.0, {}}).value;
    const BudgetSpec budget{m, v * (0.5 + 0.001 * (i % 1000)), {}};
    ArchConfig shallower = arch;
    const std::size_t j = uniform_index(rng, arch.blocks.size());
    if (shallower.blocks[j].depth == 1) continue;
    shallower.blocks[j].depth -= 1;
    if (compute_cost(arch, budget).feasible) CHECK(compute_cost(shallower, budget).feasible);
  }
}

TEST_CASE("metric names round-trip") {
  for (Metric m : {Metric::params, Metric::flops, Metric::latency}) {
    CHECK(parse_metric(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_metric("energy"), SchemaError);
  CHECK(accounting_notes().size() >= 2);
}
