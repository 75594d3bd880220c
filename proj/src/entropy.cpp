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

#include "entnas/entropy.hpp"

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <cfloat>
#include <cmath>
#include <map>

#include "entnas/errors.hpp"

namespace entnas {

namespace {

constexpr int kDecompositionRetries = 3;

double glorot_variance(int rows, int cols) { return 2.0 / (rows + cols); }

}  // namespace

void check_config(const EntropyConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (!(cfg.beta > 0.0)) throw DomainError("beta must be positive");
  if (cfg.mc_samples < 1) throw DomainError("mc_samples must be >= 1");
  if (cfg.mc_entry_budget < 0) throw DomainError("mc_entry_budget must be >= 0");
}

bool same_table_inputs(const EntropyConfig& a, const EntropyConfig& b) {
  return a.epsilon == b.epsilon && a.matrix_log_base == b.matrix_log_base &&
         a.init_rule == b.init_rule && a.mc_samples == b.mc_samples &&
         a.mc_entry_budget == b.mc_entry_budget && a.estimator == b.estimator &&
         a.spectrum == b.spectrum && a.seed == b.seed;
}

double entropy_from_singulars(std::span<const double> singular_values, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("entropy_from_singulars: epsilon must be positive");
  const double inv_eps2 = 1.0 / (epsilon * epsilon);
  double total = 0.0;
  for (double s : singular_values) {
    if (s < 0.0 || std::isnan(s)) throw DomainError("entropy_from_singulars: negative singular value");
    total += std::log1p(s * s * inv_eps2);
  }
  return total;
}

int samples_for_shape(int rows, int cols, const EntropyConfig& cfg) {
  if (cfg.mc_entry_budget <= 0) return cfg.mc_samples;
  const std::int64_t entries = static_cast<std::int64_t>(rows) * cols;
  const std::int64_t wanted = (cfg.mc_entry_budget + entries - 1) / entries;
  return static_cast<int>(std::clamp<std::int64_t>(wanted, 1, cfg.mc_samples));
}

double expected_log_det(int rows, int cols, double variance) {
  const int r = std::min(rows, cols);
  const int c = std::max(rows, cols);
  // W W^T / variance is Wishart_r(c, I); E ln det = sum_i psi((c - i) / 2) + r ln 2.
  double total = r * (std::log(variance) + std::log(2.0));
  for (int i = 0; i < r; ++i) total += boost::math::digamma(0.5 * (c - i));
  return total;
}

std::uint64_t shape_seed(std::uint64_t global_seed, int rows, int cols) {
  const Shape key = Shape{rows, cols}.canonical();
  return derive_seed({global_seed, static_cast<std::uint64_t>(key.rows),
                      static_cast<std::uint64_t>(key.cols)});
}

double expected_matrix_entropy(int rows, int cols, const EntropyConfig& cfg,
                               std::uint64_t stream_seed) {
  check_config(cfg);
  if (rows < 1 || cols < 1) throw DomainError("expected_matrix_entropy: rows and cols must be >= 1");
  const int r = std::min(rows, cols);
  const int c = std::max(rows, cols);
  const double variance = glorot_variance(r, c);
  const double eps2 = cfg.epsilon * cfg.epsilon;
  const int samples = samples_for_shape(r, c, cfg);

  double sum = 0.0;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd lambda;
    for (int attempt = 0;; ++attempt) {
      Rng rng = make_rng({stream_seed, static_cast<std::uint64_t>(s),
                          static_cast<std::uint64_t>(attempt)});
      try {
        lambda = squared_singular_values(gaussian_matrix(r, c, variance, rng), cfg.spectrum);
        break;
      } catch (const DecompositionError&) {
        if (attempt == kDecompositionRetries) throw;
      }
    }
    if (cfg.estimator == Estimator::plain) {
      Eigen::VectorXd sv = lambda.cwiseSqrt();
      sum += entropy_from_singulars({sv.data(), static_cast<std::size_t>(sv.size())}, cfg.epsilon);
    } else {
      // Eigenvalues below the rounding level of the Gram product are noise.
      const double floor = std::max(lambda.maxCoeff() * r * DBL_EPSILON, DBL_MIN);
      for (double l : lambda) sum += std::log1p(eps2 / std::max(l, floor));
    }
  }
  double mean = sum / samples;
  if (cfg.estimator == Estimator::logdet_control) {
    mean += expected_log_det(r, c, variance) - r * std::log(eps2);
  }
  return mean;
}

double expected_matrix_entropy(int rows, int cols, const EntropyConfig& cfg, Rng& rng) {
  return expected_matrix_entropy(rows, cols, cfg, rng());
}

double effectiveness_gamma(int depth, int width_channels, double beta) {
  if (width_channels < 2) {
    throw DomainError("effectiveness_gamma: width " + std::to_string(width_channels) +
                      " has no positive effective width");
  }
  return beta * depth / std::log2(static_cast<double>(width_channels));
}

ScoreBreakdown score_arch_with(const ArchConfig& arch, const EntropyConfig& cfg,
                               const ShapeEntropyFn& entropy_of) {
  ScoreBreakdown out;
  out.per_block.reserve(arch.blocks.size());
  for (const auto& b : arch.blocks) {
    BlockScore s;
    s.gamma_mhsa = effectiveness_gamma(b.depth, b.embed_dim, cfg.beta);
    s.gamma_ffn = effectiveness_gamma(b.depth, b.ffn_dim, cfg.beta);
    s.h_mhsa = 4.0 * entropy_of(b.embed_dim, b.embed_dim);
    s.h_ffn = 2.0 * entropy_of(b.embed_dim, b.ffn_dim);
    s.block_total = b.depth * (cfg.alpha_mhsa * (1.0 - s.gamma_mhsa) * s.h_mhsa +
                               cfg.alpha_ffn * (1.0 - s.gamma_ffn) * s.h_ffn);
    out.total += s.block_total;
    out.per_block.push_back(s);
  }
  return out;
}

ScoreBreakdown score_arch(const ArchConfig& arch, const EntropyConfig& cfg,
                          const EntropyTable& table) {
  table.check_compatible(cfg);
  return score_arch_with(arch, cfg, [&](int r, int c) { return table.lookup(r, c); });
}

ScoreBreakdown score_arch_direct(const ArchConfig& arch, const EntropyConfig& cfg, Rng& rng) {
  const std::uint64_t base = rng();
  std::map<Shape, double> memo;
  return score_arch_with(arch, cfg, [&](int r, int c) {
    const Shape key = Shape{r, c}.canonical();
    auto it = memo.find(key);
    if (it == memo.end()) {
      it = memo.emplace(key, expected_matrix_entropy(r, c, cfg, shape_seed(base, r, c))).first;
    }
    return it->second;
  });
}

}  // namespace entnas
