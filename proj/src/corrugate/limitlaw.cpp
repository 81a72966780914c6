// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#include "corrugate/limitlaw.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "corrugate/errors.hpp"
#include "corrugate/quadrature.hpp"
#include "corrugate/rng.hpp"

namespace corrugate::limitlaw {

namespace {
constexpr int kPanels = 64;
constexpr int kPanelOrder = 32;
}  // namespace

LimitBundle::LimitBundle(const Curve& curve, const MetricSpec& metric,
                         std::shared_ptr<const FrameField> frames, double r_min_guard)
    : curve_(curve), metric_(metric), frames_(std::move(frames)), r_min_guard_(r_min_guard) {
  if (!frames_) fail(Errc::frame_nodes_missing, "limit bundle requires a frame field");
  for (int i = 0; i < 1024; ++i) {
    const double u = static_cast<double>(i) / 1023;
    if (metric_.value(u) < curve_.speed_squared(u) - 1e-12)
      fail(Errc::not_short, "curve is not short for the metric at u=" + std::to_string(u));
  }
}

void LimitBundle::kernel_parts(double u, Vec3& a, Vec3& b) const {
  const double r = metric::residual_amplitude(curve_, metric_, u);
  a = r * frames_->at(u).Z;
  if (r <= r_min_guard_) {
    // a vanishing amplitude carries no drift; only the explicit kernel op
    // reports degeneracy
    b = Vec3::Zero();
    return;
  }
  metric::AmplitudeDerivOptions opts;
  opts.r_min = r_min_guard_;
  const double ud = std::clamp(u, 1e-7, 1.0 - 1e-7);
  b = metric::amplitude_field_derivative(curve_, metric_, *frames_, ud, opts);
}

Vec3 LimitBundle::kernel(double t, double u) const {
  if (u > t) fail(Errc::out_of_order, "kernel requires u <= t");
  if (!(t <= 1.0 && u >= 0.0)) fail(Errc::out_of_domain, "kernel arguments outside [0,1]");
  if (metric::residual_amplitude(curve_, metric_, u) <= r_min_guard_)
    fail(Errc::amplitude_degenerate, "residual amplitude below the derivative guard at u=" +
                                         std::to_string(u));
  Vec3 a, b;
  kernel_parts(u, a, b);
  return a - (t - u) * b;
}

Mat3 LimitBundle::covariance(double t1, double t2) const {
  if (!(t1 >= 0.0 && t1 <= 1.0 && t2 >= 0.0 && t2 <= 1.0))
    fail(Errc::out_of_domain, "covariance arguments outside [0,1]");
  const double tmin = std::min(t1, t2);
  Mat3 cov = Mat3::Zero();
  if (tmin <= 0.0) return cov;
  const auto& rule = quad::gauss_legendre(kPanelOrder);
  const double h = tmin / kPanels;
  for (int p = 0; p < kPanels; ++p) {
    const double a0 = p * h;
    for (int j = 0; j < kPanelOrder; ++j) {
      const double u = a0 + h * rule.nodes[static_cast<size_t>(j)];
      Vec3 a, b;
      kernel_parts(u, a, b);
      const Vec3 k1 = a - (t1 - u) * b;
      const Vec3 k2 = a - (t2 - u) * b;
      cov += (h * rule.weights[static_cast<size_t>(j)]) * (k1 * k2.transpose());
    }
  }
  return cov;
}

Eigen::MatrixXd LimitBundle::covariance_matrix(std::span<const double> t_grid) const {
  const int g = static_cast<int>(t_grid.size());
  Eigen::MatrixXd cov(3 * g, 3 * g);
  for (int i = 0; i < g; ++i)
    for (int j = i; j < g; ++j) {
      const Mat3 block = covariance(t_grid[static_cast<size_t>(i)], t_grid[static_cast<size_t>(j)]);
      cov.block<3, 3>(3 * i, 3 * j) = block;
      if (j != i) cov.block<3, 3>(3 * j, 3 * i) = block.transpose();
    }
  // symmetrize exactly before factorization
  return 0.5 * (cov + cov.transpose());
}

std::vector<double> LimitBundle::sample(std::span<const double> t_grid, int samples,
                                        std::uint64_t seed) const {
  if (samples < 1) fail(Errc::invalid_argument, "sample count must be positive");
  if (t_grid.empty()) fail(Errc::invalid_argument, "t grid must be nonempty");
  double prev = 0.0;
  for (double t : t_grid) {
    if (!(t > 0.0 && t <= 1.0)) fail(Errc::out_of_domain, "t grid must lie in (0,1]");
    if (t < prev) fail(Errc::invalid_argument, "t grid must be sorted");
    prev = t;
  }

  const Eigen::MatrixXd cov = covariance_matrix(t_grid);
  const int dim = static_cast<int>(cov.rows());
  const double trace = cov.trace();

  // Coordinates with exactly zero variance are excluded so degenerate
  // directions sample exactly 0.
  std::vector<int> active;
  for (int i = 0; i < dim; ++i)
    if (cov(i, i) != 0.0) active.push_back(i);
  const int adim = static_cast<int>(active.size());

  Eigen::MatrixXd factor = Eigen::MatrixXd::Zero(dim, adim);
  if (adim > 0) {
    Eigen::MatrixXd sub(adim, adim);
    for (int i = 0; i < adim; ++i)
      for (int j = 0; j < adim; ++j) sub(i, j) = cov(active[static_cast<size_t>(i)], active[static_cast<size_t>(j)]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
    if (es.info() != Eigen::Success) fail(Errc::internal, "eigendecomposition failed");
    const double budget = 1e-12 * std::max(trace, 0.0);
    for (int i = 0; i < adim; ++i) {
      const double lambda = es.eigenvalues()(i);
      if (lambda < -budget)
        fail(Errc::not_psd, "limit covariance is not PSD within the jitter budget (lambda=" +
                                std::to_string(lambda) + ", budget=" + std::to_string(budget) + ")");
    }
    Eigen::MatrixXd afactor(adim, adim);
    for (int j = 0; j < adim; ++j)
      afactor.col(j) = es.eigenvectors().col(j) * std::sqrt(std::max(0.0, es.eigenvalues()(j)));
    for (int i = 0; i < adim; ++i) factor.row(active[static_cast<size_t>(i)]) = afactor.row(i);
  }

  std::vector<double> out(static_cast<size_t>(samples) * dim, 0.0);
  const rng::CounterRng gen(seed);
  Eigen::VectorXd z(adim);
  for (int s = 0; s < samples; ++s) {
    const std::uint64_t base = static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(dim);
    for (int c = 0; c < adim; ++c) z(c) = gen.normal(base + static_cast<std::uint64_t>(c));
    const Eigen::VectorXd x = factor * z;
    for (int i = 0; i < dim; ++i) out[static_cast<size_t>(s) * dim + i] = x(i);
  }
  return out;
}

std::vector<Vec3> LimitBundle::euler_path(int resolution, std::uint64_t seed) const {
  if (resolution < 16) fail(Errc::invalid_argument, "euler resolution must be at least 16");
  const int m = resolution;
  const double dt = 1.0 / m;
  const double sdt = std::sqrt(dt);

  // coefficient tables at the left endpoints; the derivative coefficient of
  // the first step is taken at dt/2 (no central difference exists at u=0)
  std::vector<Vec3> a(static_cast<size_t>(m)), b(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double u = j * dt;
    Vec3 av, bv;
    kernel_parts(u, av, bv);
    a[static_cast<size_t>(j)] = av;
    if (j == 0) kernel_parts(0.5 * dt, av, bv);
    b[static_cast<size_t>(j)] = bv;
  }

  const rng::CounterRng gen(seed);
  std::vector<Vec3> path(static_cast<size_t>(m) + 1, Vec3::Zero());
  quad::KahanVec3 ito_a;    // int r Z dW
  quad::KahanVec3 ito_b;    // inner Ito integral A(s) = int (rZ)' dW
  quad::KahanVec3 riemann;  // left-endpoint Riemann sum of A
  for (int j = 0; j < m; ++j) {
    riemann.add(dt * ito_b.value());  // A at j/m, before this step's increment
    const double dw = sdt * gen.normal(static_cast<std::uint64_t>(j));
    ito_a.add(dw * a[static_cast<size_t>(j)]);
    ito_b.add(dw * b[static_cast<size_t>(j)]);
    path[static_cast<size_t>(j) + 1] = ito_a.value() - riemann.value();
  }
  return path;
}

}  // namespace corrugate::limitlaw
