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

#include <omp.h>

#include <algorithm>
#include <set>

#include "entnas/entropy.hpp"
#include "entnas/errors.hpp"

namespace entnas {

EntropyTable::EntropyTable(TableMeta meta, std::vector<TableEntry> entries)
    : meta_(std::move(meta)), entries_(std::move(entries)) {
  for (auto& e : entries_) e.shape = e.shape.canonical();
  std::sort(entries_.begin(), entries_.end(),
            [](const TableEntry& a, const TableEntry& b) { return a.shape < b.shape; });
  auto dup = std::adjacent_find(entries_.begin(), entries_.end(),
                                [](const TableEntry& a, const TableEntry& b) {
                                  return a.shape == b.shape;
                                });
  if (dup != entries_.end()) throw SchemaError("entropy table has duplicate shapes");
  for (const auto& e : entries_) {
    if (!(e.value >= 0.0)) throw SchemaError("entropy table has a negative entry");
  }
}

bool EntropyTable::contains(int rows, int cols) const {
  const Shape key = Shape{rows, cols}.canonical();
  return std::binary_search(entries_.begin(), entries_.end(), TableEntry{key, 0.0},
                            [](const TableEntry& a, const TableEntry& b) { return a.shape < b.shape; });
}

double EntropyTable::lookup(int rows, int cols) const {
  const Shape key = Shape{rows, cols}.canonical();
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                             [](const TableEntry& e, const Shape& s) { return e.shape < s; });
  if (it == entries_.end() || it->shape != key) {
    throw MissingKeyError("entropy table has no entry for (" + std::to_string(rows) + ", " +
                          std::to_string(cols) + ")");
  }
  return it->value;
}

void EntropyTable::check_compatible(const EntropyConfig& cfg) const {
  if (!same_table_inputs(meta_.config, cfg)) {
    throw StaleTableError("entropy table was built with a different entropy configuration");
  }
}

std::vector<Shape> required_shapes(const SearchSpaceDef& space, const TableBuildOptions& opts) {
  check_space(space);
  std::set<Shape> shapes;
  auto add = [&](int r, int c) { shapes.insert(Shape{r, c}.canonical()); };
  for (int e : space.embed_choices) {
    add(e, e);
    for (int f : space.ffn_choices) add(e, f);
    if (space.num_blocks > 1) {
      for (int e2 : space.embed_choices) {
        if (e2 > e) add(e, e2);
      }
    }
    if (opts.embed_proj_dim > 0) add(opts.embed_proj_dim, e);
  }
  for (const auto& arch : opts.extra_archs) {
    for (std::size_t j = 0; j < arch.blocks.size(); ++j) {
      const auto& b = arch.blocks[j];
      add(b.embed_dim, b.embed_dim);
      add(b.embed_dim, b.ffn_dim);
      if (j + 1 < arch.blocks.size() && arch.blocks[j + 1].embed_dim != b.embed_dim) {
        add(b.embed_dim, arch.blocks[j + 1].embed_dim);
      }
    }
    if (arch.embed_proj_dim > 0 && !arch.blocks.empty()) {
      add(arch.embed_proj_dim, arch.blocks.front().embed_dim);
      add(arch.embed_proj_dim, arch.blocks.back().embed_dim);
    }
  }
  return {shapes.begin(), shapes.end()};
}

namespace {

TableMeta make_meta(const SearchSpaceDef& space, const EntropyConfig& cfg,
                    const TableBuildOptions& opts) {
  TableMeta meta;
  meta.config = cfg;
  meta.space = space;
  meta.embed_proj_dim = opts.embed_proj_dim;
  meta.extra_archs = opts.extra_archs;
  meta.build_timestamp = opts.build_timestamp;
  return meta;
}

}  // namespace

EntropyTable build_table(const SearchSpaceDef& space, const EntropyConfig& cfg,
                         const TableBuildOptions& opts, int threads) {
  check_config(cfg);
  const std::vector<Shape> shapes = required_shapes(space, opts);
  std::vector<TableEntry> entries(shapes.size());

  // Largest shapes first so dynamic scheduling balances the tail.
  std::vector<std::size_t> order(shapes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ca = static_cast<double>(shapes[a].rows) * shapes[a].rows * shapes[a].cols;
    const double cb = static_cast<double>(shapes[b].rows) * shapes[b].rows * shapes[b].cols;
    return ca != cb ? ca > cb : a < b;
  });

  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  const long n = static_cast<long>(order.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
  for (long k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    const Shape s = shapes[i];
    try {
      entries[i] = {s, expected_matrix_entropy(s.rows, s.cols, cfg,
                                               shape_seed(cfg.seed, s.rows, s.cols))};
    } catch (...) {
#pragma omp critical(entnas_table_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return EntropyTable(make_meta(space, cfg, opts), std::move(entries));
}

EntropyTable build_table_serial(const SearchSpaceDef& space, const EntropyConfig& cfg,
                                const TableBuildOptions& opts) {
  check_config(cfg);
  std::vector<TableEntry> entries;
  for (const Shape& s : required_shapes(space, opts)) {
    entries.push_back({s, expected_matrix_entropy(s.rows, s.cols, cfg,
                                                  shape_seed(cfg.seed, s.rows, s.cols))});
  }
  return EntropyTable(make_meta(space, cfg, opts), std::move(entries));
}

}  // namespace entnas
