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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entnas/archspace.hpp"
#include "entnas/rng.hpp"
#include "entnas/spectrum.hpp"

namespace entnas {

enum class MatrixLogBase { natural };
enum class WidthLogBase { base2 };
enum class InitRule { glorot };  // entry variance 2 / (rows + cols)

/// How the per-shape expectation is estimated from random draws.
///  - plain: sample mean of sum_j ln(1 + s_j^2 / eps^2).
///  - logdet_control: the same draws, with ln det(W W^T) used as a control
///    variate whose Gaussian expectation is known exactly. Unbiased; the
///    remaining Monte-Carlo term sum_j ln(1 + eps^2 / s_j^2) is tiny for
///    rectangular shapes, so one draw of a large matrix already lands within
///    a fraction of a nat of the expectation.
enum class Estimator { plain, logdet_control };

struct EntropyConfig {
  double epsilon = 0.01;
  double beta = 1.0 / 16.0;
  double alpha_mhsa = 1.0;
  double alpha_ffn = 1.0;
  MatrixLogBase matrix_log_base = MatrixLogBase::natural;
  WidthLogBase width_log_base = WidthLogBase::base2;
  InitRule init_rule = InitRule::glorot;
  int mc_samples = 64;
  // Draws per shape are ceil(mc_entry_budget / (rows * cols)) clamped to
  // [1, mc_samples]; 0 disables the budget and always uses mc_samples.
  std::int64_t mc_entry_budget = 64 * 64 * 64;
  Estimator estimator = Estimator::logdet_control;
  SpectrumMethod spectrum = SpectrumMethod::gram_eigen;
  std::uint64_t seed = 0;

  friend bool operator==(const EntropyConfig&, const EntropyConfig&) = default;
};

/// Throws DomainError unless epsilon > 0, beta > 0 and mc_samples >= 1.
void check_config(const EntropyConfig& cfg);

/// True when two configurations produce identical table entries (alpha and
/// beta only enter at scoring time).
bool same_table_inputs(const EntropyConfig& a, const EntropyConfig& b);

/// sum_j ln(1 + s_j^2 / eps^2), in nats.
double entropy_from_singulars(std::span<const double> singular_values, double epsilon);

int samples_for_shape(int rows, int cols, const EntropyConfig& cfg);

/// Exact E[sum_j ln s_j^2] for a rows x cols matrix of i.i.d. N(0, variance).
double expected_log_det(int rows, int cols, double variance);

/// Monte-Carlo expectation of the matrix entropy of a freshly initialized
/// rows x cols weight. The matrix is always drawn in (min, max) orientation,
/// so (a, b) and (b, a) agree exactly for the same stream seed. A failed
/// decomposition is retried with a fresh draw up to three times.
double expected_matrix_entropy(int rows, int cols, const EntropyConfig& cfg,
                               std::uint64_t stream_seed);

/// Convenience overload drawing the stream seed from `rng`.
double expected_matrix_entropy(int rows, int cols, const EntropyConfig& cfg, Rng& rng);

/// Seed of the table entry for (rows, cols); symmetric in its arguments.
std::uint64_t shape_seed(std::uint64_t global_seed, int rows, int cols);

/// beta * depth / log2(width). Throws DomainError for width < 2.
double effectiveness_gamma(int depth, int width_channels, double beta);

struct Shape {
  int rows = 0;
  int cols = 0;

  /// (min, max) orientation used as the table key.
  Shape canonical() const { return rows <= cols ? *this : Shape{cols, rows}; }

  friend bool operator==(const Shape&, const Shape&) = default;
  friend auto operator<=>(const Shape&, const Shape&) = default;
};

struct TableEntry {
  Shape shape;  // canonical
  double value = 0.0;
};

struct TableMeta {
  EntropyConfig config;
  std::optional<SearchSpaceDef> space;
  int embed_proj_dim = 768;
  std::vector<ArchConfig> extra_archs;
  std::string build_timestamp;
};

/// Immutable (rows, cols) -> expected entropy map, sorted by canonical shape.
class EntropyTable {
 public:
  EntropyTable() = default;
  EntropyTable(TableMeta meta, std::vector<TableEntry> entries);

  const TableMeta& meta() const { return meta_; }
  const std::vector<TableEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  bool contains(int rows, int cols) const;

  /// Throws MissingKeyError when the shape was not built.
  double lookup(int rows, int cols) const;

  /// Throws StaleTableError unless same_table_inputs(meta().config, cfg).
  void check_compatible(const EntropyConfig& cfg) const;

 private:
  TableMeta meta_;
  std::vector<TableEntry> entries_;
};

struct TableBuildOptions {
  int embed_proj_dim = 768;
  // Architectures outside the space whose shapes should also be present.
  std::vector<ArchConfig> extra_archs;
  std::string build_timestamp;
};

/// Every canonical shape any architecture of the space (or an extra arch)
/// can touch: (E,E), (E,F), adjacent (E_j, E_j+1) and (embed_proj_dim, E).
std::vector<Shape> required_shapes(const SearchSpaceDef& space, const TableBuildOptions& opts = {});

/// OpenMP over shapes; threads <= 0 uses the OpenMP default.
EntropyTable build_table(const SearchSpaceDef& space, const EntropyConfig& cfg,
                         const TableBuildOptions& opts = {}, int threads = 0);

/// Single-threaded reference; bit-identical to build_table.
EntropyTable build_table_serial(const SearchSpaceDef& space, const EntropyConfig& cfg,
                                const TableBuildOptions& opts = {});

struct BlockScore {
  double gamma_mhsa = 0.0;
  double gamma_ffn = 0.0;
  double h_mhsa = 0.0;  // single layer, Q/K/V/O
  double h_ffn = 0.0;   // single layer, both FFN maps
  double block_total = 0.0;
};

struct ScoreBreakdown {
  std::vector<BlockScore> per_block;
  double total = 0.0;
};

using ShapeEntropyFn = std::function<double(int rows, int cols)>;

/// Penalized block-wise objective:
///   sum_j L_j [a1 (1 - gamma_mhsa) 4 T(E,E) + a2 (1 - gamma_ffn) 2 T(E,F)].
/// Inter-block projections are not part of the objective.
ScoreBreakdown score_arch_with(const ArchConfig& arch, const EntropyConfig& cfg,
                               const ShapeEntropyFn& entropy_of);

ScoreBreakdown score_arch(const ArchConfig& arch, const EntropyConfig& cfg,
                          const EntropyTable& table);

/// Same objective with every T(., .) computed afresh (no table).
ScoreBreakdown score_arch_direct(const ArchConfig& arch, const EntropyConfig& cfg, Rng& rng);

}  // namespace entnas
