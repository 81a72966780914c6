// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0
//
// Exercises the shared-library surface end to end: handle lifecycles, error
// codes, and numeric agreement with the contracts the core tests pin down.

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "corrugate/corrugate.h"
#include "doctest.h"

namespace {

crg_curve* make_line(double dx) {
  const char* keys[] = {"dx", "dy", "dz"};
  const double vals[] = {dx, 0.0, 0.0};
  crg_curve* c = nullptr;
  REQUIRE(crg_curve_create("line", keys, vals, 3, &c) == CRG_OK);
  return c;
}

crg_curve* make_helix() {
  const char* keys[] = {"a", "b"};
  const double vals[] = {0.1, 0.05};
  crg_curve* c = nullptr;
  REQUIRE(crg_curve_create("helix", keys, vals, 2, &c) == CRG_OK);
  return c;
}

crg_metric* make_const_metric(double g) {
  crg_metric* m = nullptr;
  REQUIRE(crg_metric_create("const", &g, 1, &m) == CRG_OK);
  return m;
}

crg_frames* make_frames(crg_curve* curve, int intervals) {
  std::vector<double> nodes(static_cast<size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) nodes[static_cast<size_t>(i)] = static_cast<double>(i) / intervals;
  crg_frames* f = nullptr;
  REQUIRE(crg_frames_build(curve, 0, nodes.data(), nodes.size(), nullptr, &f) == CRG_OK);
  return f;
}

}  // namespace

TEST_CASE("error codes and messages") {
  crg_curve* c = nullptr;
  CHECK(crg_curve_create("moebius", nullptr, nullptr, 0, &c) == CRG_ERR_INVALID);
  CHECK(std::strlen(crg_last_error()) > 0);

  crg_curve* line = make_line(0.5);
  crg_metric* tiny = make_const_metric(0.2);
  crg_frames* frames = make_frames(line, 4);
  crg_phase* phase = nullptr;
  REQUIRE(crg_phase_deterministic(8, &phase) == CRG_OK);
  crg_map* map = nullptr;
  CHECK(crg_map_build(line, tiny, frames, phase, 16, &map) == CRG_ERR_DOMAIN);  // not short
  CHECK(std::string(crg_last_error()).find("not short") != std::string::npos);

  crg_enumeration* en = nullptr;
  const double ts[] = {1.0};
  crg_metric* ok = make_const_metric(1.25);
  CHECK(crg_enumeration_run(line, ok, frames, 25, 16, ts, 1, &en) == CRG_ERR_TOO_LARGE);

  crg_phase_destroy(phase);
  crg_frames_destroy(frames);
  crg_metric_destroy(tiny);
  crg_metric_destroy(ok);
  crg_curve_destroy(line);
  CHECK(std::string(crg_version()).find("corrugate") != std::string::npos);
}

TEST_CASE("curve, frames, metric round trip") {
  crg_curve* helix = make_helix();
  double d[3];
  REQUIRE(crg_curve_derivative(helix, 0.0, 0, d) == CRG_OK);
  CHECK(d[0] == doctest::Approx(0.1));

  crg_frames* frames = make_frames(helix, 256);
  double f9[9];
  REQUIRE(crg_frames_eval(frames, 0.37, f9) == CRG_OK);
  // orthonormality of (X,Y,Z)
  for (int a = 0; a < 3; ++a) {
    double norm = 0.0;
    for (int i = 0; i < 3; ++i) norm += f9[3 * a + i] * f9[3 * a + i];
    CHECK(std::abs(norm - 1.0) <= 1e-12);
  }
  double xy = 0.0;
  for (int i = 0; i < 3; ++i) xy += f9[i] * f9[3 + i];
  CHECK(std::abs(xy) <= 1e-12);

  double fr[9];
  CHECK(crg_frenet_frame(helix, 0.5, fr) == CRG_OK);
  crg_curve* line = make_line(0.5);
  CHECK(crg_frenet_frame(line, 0.5, fr) == CRG_ERR_DOMAIN);  // curvature vanishes

  crg_metric* g = make_const_metric(1.25);
  double r = 0.0;
  REQUIRE(crg_residual_amplitude(line, g, 0.4, &r) == CRG_OK);
  CHECK(r == doctest::Approx(1.0).epsilon(1e-14));

  crg_shortness_report rep{};
  REQUIRE(crg_shortness(line, g, 64, &rep) == CRG_OK);
  CHECK(rep.is_strictly_short == 1);
  CHECK(rep.min_margin == doctest::Approx(std::sqrt(1.25) - 0.5).epsilon(1e-14));

  crg_metric_destroy(g);
  crg_curve_destroy(line);
  crg_frames_destroy(frames);
  crg_curve_destroy(helix);
}

TEST_CASE("twisted map through the C surface") {
  crg_curve* line = make_line(0.5);
  crg_metric* g = make_const_metric(1.25);
  crg_frames* frames = make_frames(line, 1);
  crg_phase* phase = nullptr;
  REQUIRE(crg_phase_random(8, 7, &phase) == CRG_OK);
  std::int8_t signs[8];
  REQUIRE(crg_phase_signs(phase, signs) == CRG_OK);

  crg_map* map = nullptr;
  REQUIRE(crg_map_build(line, g, frames, phase, 16, &map) == CRG_OK);
  double defect = 1.0;
  REQUIRE(crg_map_isometry_defect(map, 512, &defect) == CRG_OK);
  CHECK(defect <= 1e-10);

  // random-walk identity at the breakpoints
  std::vector<double> ts(8);
  for (int k = 1; k <= 8; ++k) ts[static_cast<size_t>(k - 1)] = k / 8.0;
  std::vector<double> out(8 * 3), cposer(8 * 3), sposer(8 * 3);
  REQUIRE(crg_map_scaled_difference(map, ts.data(), ts.size(), out.data(), cposer.data(),
                                    sposer.data()) == CRG_OK);
  long walk = 0;
  for (int k = 1; k <= 8; ++k) {
    walk += signs[k - 1];
    CHECK(std::abs(out[static_cast<size_t>(k - 1) * 3 + 2] - walk / std::sqrt(8.0)) <= 1e-9);
  }

  double sup = 0.0;
  REQUIRE(crg_map_sup_difference(map, 65, &sup) == CRG_OK);
  CHECK(sup <= 1.1 / (M_PI * 8) + 0.02);

  crg_map_destroy(map);
  crg_phase_destroy(phase);
  crg_frames_destroy(frames);
  crg_metric_destroy(g);
  crg_curve_destroy(line);
}

TEST_CASE("ensemble and enumeration through the C surface") {
  crg_curve* helix = make_helix();
  crg_metric* g2 = make_const_metric(2.0);
  crg_frames* frames = make_frames(helix, 512);

  crg_ensemble_config cfg{};
  cfg.n = 32;
  cfg.samples = 64;
  cfg.master_seed = 9;
  const double ts[] = {0.5, 1.0};
  crg_ensemble* e1 = nullptr;
  crg_ensemble* e2 = nullptr;
  REQUIRE(crg_ensemble_run(helix, g2, frames, &cfg, ts, 2, &e1) == CRG_OK);
  cfg.workers = 2;
  REQUIRE(crg_ensemble_run(helix, g2, frames, &cfg, ts, 2, &e2) == CRG_OK);
  int samples = 0, grid = 0;
  REQUIRE(crg_ensemble_size(e1, &samples, &grid) == CRG_OK);
  CHECK(samples == 64);
  CHECK(grid == 2);
  CHECK(std::memcmp(crg_ensemble_data(e1), crg_ensemble_data(e2),
                    sizeof(double) * 64 * 2 * 3) == 0);
  double wall = -1.0;
  REQUIRE(crg_ensemble_wall_time(e1, &wall) == CRG_OK);
  CHECK(wall >= 0.0);

  crg_enumeration* en = nullptr;
  REQUIRE(crg_enumeration_run(helix, g2, frames, 6, 16, ts, 2, &en) == CRG_OK);
  std::uint64_t outcomes = 0;
  REQUIRE(crg_enumeration_outcomes(en, &outcomes) == CRG_OK);
  CHECK(outcomes == 64);
  std::vector<double> mean(6), cov(36), row(6);
  REQUIRE(crg_enumeration_moments(en, mean.data(), cov.data()) == CRG_OK);
  // recomputing every outcome reproduces the mean
  std::vector<double> acc(6, 0.0);
  for (std::uint64_t j = 0; j < outcomes; ++j) {
    REQUIRE(crg_enumeration_outcome(en, j, row.data()) == CRG_OK);
    for (int i = 0; i < 6; ++i) acc[static_cast<size_t>(i)] += row[static_cast<size_t>(i)];
  }
  for (int i = 0; i < 6; ++i)
    CHECK(acc[static_cast<size_t>(i)] / outcomes == doctest::Approx(mean[static_cast<size_t>(i)]).epsilon(1e-12));

  crg_enumeration_destroy(en);
  crg_ensemble_destroy(e1);
  crg_ensemble_destroy(e2);
  crg_frames_destroy(frames);
  crg_metric_destroy(g2);
  crg_curve_destroy(helix);
}

TEST_CASE("limit law and stats through the C surface") {
  crg_curve* line = make_line(0.5);
  crg_metric* g = make_const_metric(1.25);
  crg_frames* frames = make_frames(line, 1);
  crg_bundle* bundle = nullptr;
  REQUIRE(crg_bundle_create(line, g, frames, 0.0, &bundle) == CRG_OK);

  double k3[3];
  REQUIRE(crg_limit_kernel(bundle, 0.8, 0.2, k3) == CRG_OK);
  CHECK(k3[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(crg_limit_kernel(bundle, 0.2, 0.8, k3) == CRG_ERR_DOMAIN);

  double c9[9];
  REQUIRE(crg_limit_covariance(bundle, 0.3, 0.8, c9) == CRG_OK);
  CHECK(c9[8] == doctest::Approx(0.3).epsilon(1e-10));

  const double ts[] = {0.5, 1.0};
  std::vector<double> cov(36);
  REQUIRE(crg_limit_covariance_matrix(bundle, ts, 2, cov.data()) == CRG_OK);
  CHECK(cov[2 * 6 + 2] == doctest::Approx(0.5).epsilon(1e-10));

  std::vector<double> draws(1000 * 6);
  REQUIRE(crg_limit_sample(bundle, ts, 2, 1000, 5, draws.data()) == CRG_OK);
  std::vector<double> path((64 + 1) * 3);
  REQUIRE(crg_euler_limit_path(bundle, 64, 5, path.data()) == CRG_OK);

  double mean[6], covm[36], se[36];
  REQUIRE(crg_empirical_moments(draws.data(), 1000, 6, mean, covm, se) == CRG_OK);
  int pass[36], all_pass = 0;
  double worst = 0.0;
  REQUIRE(crg_covariance_comparison(covm, cov.data(), se, 6, 4.0, pass, &worst, &all_pass) ==
          CRG_OK);
  CHECK(all_pass == 1);  // self-consistency of the sampler with its own oracle

  std::vector<double> zs(1000);
  for (int i = 0; i < 1000; ++i) zs[static_cast<size_t>(i)] = draws[static_cast<size_t>(i) * 6 + 5];
  double stat = 0.0, p = 0.0;
  int degenerate = 0;
  REQUIRE(crg_ks_gof(zs.data(), zs.size(), 1.0, &stat, &p, &degenerate) == CRG_OK);
  CHECK(p >= 1e-4);

  const int ns[] = {8, 16, 32, 64};
  const double vals[] = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
  REQUIRE(crg_rate_fit(ns, vals, 4, &slope, &intercept, &r2) == CRG_OK);
  CHECK(slope == doctest::Approx(-1.0).epsilon(1e-12));

  double q = 0.0;
  REQUIRE(crg_normal_quantile(0.975, &q) == CRG_OK);
  CHECK(q == doctest::Approx(1.959963984540).epsilon(1e-9));

  crg_bundle_destroy(bundle);
  crg_frames_destroy(frames);
  crg_metric_destroy(g);
  crg_curve_destroy(line);
}
