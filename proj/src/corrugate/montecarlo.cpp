// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#include "corrugate/montecarlo.hpp"

#include <chrono>
#include <cmath>
#include <string>
#include <thread>

#include "corrugate/errors.hpp"
#include "corrugate/quadrature.hpp"
#include "corrugate/rng.hpp"

namespace corrugate::mc {

namespace {

using twist::PhasePath;
using twist::SignSequence;
using twist::TwistedMap;
using twist::TwistSkeleton;

void validate_grid(std::span<const double> grid) {
  if (grid.empty()) fail(Errc::invalid_argument, "t grid must be nonempty");
  double prev = 0.0;
  for (double t : grid) {
    if (!(t > 0.0 && t <= 1.0)) fail(Errc::out_of_domain, "t grid must lie in (0,1]");
    if (t < prev) fail(Errc::invalid_argument, "t grid must be sorted");
    prev = t;
  }
}

// One sample's D_n at the planned grid points, streaming the per-map
// prefixes over the subintervals with compensated accumulation.
void sample_readout(const TwistSkeleton& skel, const std::vector<TwistSkeleton::GridPoint>& plans,
                    const SignSequence& signs, double* out, Vec3* cos_out) {
  const int n = skel.n();
  const double len = 1.0 / n;
  quad::KahanVec3 sin_drift, outer_sin;
  size_t next = 0;
  for (int k = 0; k <= n; ++k) {
    while (next < plans.size() && plans[next].k == k) {
      const auto& plan = plans[next];
      const int sg = k < n ? signs.at(k) : 1;
      Vec3 c;
      const Vec3 d = TwistedMap::readout(skel, plan, skel.outer_cos_prefix(k), skel.cos_drift(k),
                                         outer_sin.value(), sin_drift.value(), sg,
                                         cos_out ? &c : nullptr, nullptr);
      if (cos_out) cos_out[next] = c;
      out[3 * next] = d.x();
      out[3 * next + 1] = d.y();
      out[3 * next + 2] = d.z();
      ++next;
    }
    if (k == n) break;
    const int sg = signs.at(k);
    outer_sin.add(len * sin_drift.value() + static_cast<double>(sg) * skel.outer_sin_panel(k));
    sin_drift.add(static_cast<double>(sg) * skel.sin_full(k));
  }
}

}  // namespace

SignSequence signs_for_sample(const ExperimentConfig& config, int sample_index) {
  switch (config.sign_mode) {
    case SignMode::random:
      return SignSequence::sample(config.n, rng::derive_key(config.master_seed,
                                                            static_cast<std::uint64_t>(sample_index)));
    case SignMode::all_plus: {
      std::vector<std::int8_t> s(static_cast<size_t>(config.n), 1);
      return SignSequence::from_signs(std::move(s));
    }
    case SignMode::enumerate_all: {
      std::vector<std::int8_t> s(static_cast<size_t>(config.n));
      for (int k = 0; k < config.n; ++k)
        s[static_cast<size_t>(k)] =
            (static_cast<std::uint64_t>(sample_index) >> k) & 1u ? 1 : -1;
      return SignSequence::from_signs(std::move(s));
    }
  }
  fail(Errc::internal, "unreachable sign mode");
}

Ensemble run_ensemble(const Curve& curve, const MetricSpec& metric,
                      std::shared_ptr<const FrameField> frames, const ExperimentConfig& config) {
  if (config.n < 1) fail(Errc::invalid_argument, "frequency n must be positive");
  if (config.samples < 1) fail(Errc::invalid_argument, "sample count must be positive");
  validate_grid(config.t_grid);
  const std::uint64_t cost = static_cast<std::uint64_t>(config.n) *
                             static_cast<std::uint64_t>(config.samples) *
                             static_cast<std::uint64_t>(config.quadrature_order);
  if (cost > config.cost_cap)
    fail(Errc::resource_budget, "ensemble cost estimate " + std::to_string(cost) +
                                    " exceeds the configured cap " + std::to_string(config.cost_cap));
  if (config.sign_mode == SignMode::enumerate_all && config.n > 62)
    fail(Errc::too_large, "enumerate_all sign mode limited to n <= 62");

  const auto t0 = std::chrono::steady_clock::now();
  auto skel = std::make_shared<TwistSkeleton>(curve, metric, std::move(frames), config.n,
                                              config.quadrature_order);
  std::vector<TwistSkeleton::GridPoint> plans;
  plans.reserve(config.t_grid.size());
  for (double t : config.t_grid) plans.push_back(skel->plan(t));

  Ensemble ens;
  ens.config = config;
  ens.grid_size = static_cast<int>(config.t_grid.size());
  ens.samples.assign(static_cast<size_t>(config.samples) * ens.grid_size * 3, 0.0);
  ens.sample_seeds.resize(static_cast<size_t>(config.samples), 0);
  ens.cos_channel.assign(static_cast<size_t>(ens.grid_size), Vec3::Zero());

  // the cos channel is sign-free: read it off any one sample
  {
    const SignSequence s0 = signs_for_sample(config, 0);
    std::vector<double> scratch(static_cast<size_t>(ens.grid_size) * 3);
    sample_readout(*skel, plans, s0, scratch.data(), ens.cos_channel.data());
  }

  int workers = config.workers;
  if (workers <= 0)
    workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, config.samples);

  const auto run_block = [&](int lo, int hi) {
    for (int j = lo; j < hi; ++j) {
      const SignSequence signs = signs_for_sample(ens.config, j);
      sample_readout(*skel, plans, signs,
                     ens.samples.data() + static_cast<size_t>(j) * ens.grid_size * 3, nullptr);
    }
  };
  for (int j = 0; j < config.samples; ++j)
    ens.sample_seeds[static_cast<size_t>(j)] =
        config.sign_mode == SignMode::random
            ? rng::derive_key(config.master_seed, static_cast<std::uint64_t>(j))
            : static_cast<std::uint64_t>(j);

  if (workers == 1) {
    run_block(0, config.samples);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    const int per = (config.samples + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int lo = w * per;
      const int hi = std::min(config.samples, lo + per);
      if (lo >= hi) break;
      pool.emplace_back(run_block, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  ens.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return ens;
}

ExactLaw enumerate_exact(const Curve& curve, const MetricSpec& metric,
                         std::shared_ptr<const FrameField> frames, int n,
                         std::span<const double> t_grid, int quadrature_order,
                         const std::function<void(std::uint64_t, std::span<const double>)>&
                             row_callback) {
  if (n < 1) fail(Errc::invalid_argument, "frequency n must be positive");
  if (n > 20) fail(Errc::too_large, "exact enumeration capped at n <= 20 (2^n outcomes)");
  validate_grid(t_grid);

  auto skel =
      std::make_shared<TwistSkeleton>(curve, metric, std::move(frames), n, quadrature_order);
  std::vector<TwistSkeleton::GridPoint> plans;
  plans.reserve(t_grid.size());
  for (double t : t_grid) plans.push_back(skel->plan(t));

  ExactLaw law;
  law.n = n;
  law.t_grid.assign(t_grid.begin(), t_grid.end());
  law.outcomes = 1ull << n;
  const int dim = static_cast<int>(t_grid.size()) * 3;
  law.mean.assign(static_cast<size_t>(dim), 0.0);
  law.covariance.assign(static_cast<size_t>(dim) * dim, 0.0);

  std::vector<double> row(static_cast<size_t>(dim));
  std::vector<Vec3> cosrow(t_grid.size());
  std::vector<std::int8_t> bits(static_cast<size_t>(n));
  const auto signs_of = [&](std::uint64_t j) {
    for (int k = 0; k < n; ++k) bits[static_cast<size_t>(k)] = (j >> k) & 1u ? 1 : -1;
    return SignSequence::from_signs(bits);
  };

  // two passes: exact mean first, then centered second moments
  std::vector<quad::Kahan> mean_acc(static_cast<size_t>(dim));
  for (std::uint64_t j = 0; j < law.outcomes; ++j) {
    sample_readout(*skel, plans, signs_of(j), row.data(), cosrow.data());
    for (int i = 0; i < dim; ++i) mean_acc[static_cast<size_t>(i)].add(row[static_cast<size_t>(i)]);
    if (row_callback) row_callback(j, row);
  }
  const double w = 1.0 / static_cast<double>(law.outcomes);
  for (int i = 0; i < dim; ++i) law.mean[static_cast<size_t>(i)] = mean_acc[static_cast<size_t>(i)].value() * w;
  law.mean_cos.assign(static_cast<size_t>(dim), 0.0);
  for (size_t ti = 0; ti < t_grid.size(); ++ti)
    for (int c = 0; c < 3; ++c) law.mean_cos[3 * ti + static_cast<size_t>(c)] = cosrow[ti](c);

  std::vector<quad::Kahan> cov_acc(static_cast<size_t>(dim) * dim);
  std::vector<double> centered(static_cast<size_t>(dim));
  for (std::uint64_t j = 0; j < law.outcomes; ++j) {
    sample_readout(*skel, plans, signs_of(j), row.data(), nullptr);
    for (int i = 0; i < dim; ++i)
      centered[static_cast<size_t>(i)] = row[static_cast<size_t>(i)] - law.mean[static_cast<size_t>(i)];
    for (int i = 0; i < dim; ++i)
      for (int k = i; k < dim; ++k)
        cov_acc[static_cast<size_t>(i) * dim + k].add(centered[static_cast<size_t>(i)] *
                                                      centered[static_cast<size_t>(k)]);
  }
  for (int i = 0; i < dim; ++i)
    for (int k = i; k < dim; ++k) {
      const double v = cov_acc[static_cast<size_t>(i) * dim + k].value() * w;
      law.covariance[static_cast<size_t>(i) * dim + k] = v;
      law.covariance[static_cast<size_t>(k) * dim + i] = v;
    }
  return law;
}

}  // namespace corrugate::mc
