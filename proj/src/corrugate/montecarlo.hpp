// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "corrugate/twist.hpp"

namespace corrugate::mc {

using geometry::Curve;
using geometry::FrameField;
using geometry::Vec3;
using metric::MetricSpec;

/// How ensemble sign sequences are produced.  `random` is the production
/// path; the other two are test hooks: `all_plus` forces every sign to +1
/// (matches the deterministic phase) and `enumerate_all` walks the sample
/// index bits so M = 2^n iterates the whole sample space.
enum class SignMode { random, all_plus, enumerate_all };

struct ExperimentConfig {
  int n = 1024;
  int samples = 2000;
  std::vector<double> t_grid = {0.25, 0.5, 0.75, 1.0};
  std::uint64_t master_seed = 42;
  int quadrature_order = 16;
  int workers = 0;  // 0 = auto
  SignMode sign_mode = SignMode::random;
  std::uint64_t cost_cap = 10'000'000'000ull;  // guard on n * samples * q
};

struct Ensemble {
  ExperimentConfig config;
  int grid_size = 0;
  /// samples * grid_size * 3 row-major D_n values
  std::vector<double> samples;
  /// deterministic cos-channel of D_n on the grid (shared by all samples)
  std::vector<Vec3> cos_channel;
  std::vector<std::uint64_t> sample_seeds;
  double wall_time_seconds = 0.0;

  Vec3 value(int sample, int ti) const {
    const size_t base = (static_cast<size_t>(sample) * grid_size + ti) * 3;
    return Vec3(samples[base], samples[base + 1], samples[base + 2]);
  }
};

twist::SignSequence signs_for_sample(const ExperimentConfig& config, int sample_index);

/// M independent random twists evaluated through scaled_difference on the
/// grid.  Deterministic bit-for-bit for fixed config, regardless of workers.
Ensemble run_ensemble(const Curve& curve, const MetricSpec& metric,
                      std::shared_ptr<const FrameField> frames, const ExperimentConfig& config);

struct ExactLaw {
  int n = 0;
  std::vector<double> t_grid;
  std::uint64_t outcomes = 0;        // 2^n
  std::vector<double> mean;          // 3G
  std::vector<double> covariance;    // (3G)^2 row-major, population weighting
  std::vector<double> mean_cos;      // the sign-free channel of the mean
};

/// All 2^n sign sequences with uniform weight 2^-n; exact mean and population
/// covariance of D_n on the grid.  The optional callback streams one outcome
/// row (3G doubles) per sequence, in index order.
ExactLaw enumerate_exact(const Curve& curve, const MetricSpec& metric,
                         std::shared_ptr<const FrameField> frames, int n,
                         std::span<const double> t_grid, int quadrature_order = 16,
                         const std::function<void(std::uint64_t, std::span<const double>)>&
                             row_callback = nullptr);

}  // namespace corrugate::mc
