// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "corrugate/curve.hpp"
#include "corrugate/frame.hpp"
#include "corrugate/metric.hpp"

namespace corrugate::limitlaw {

using geometry::Curve;
using geometry::FrameField;
using geometry::Vec3;
using metric::MetricSpec;
using Mat3 = Eigen::Matrix3d;

/// Deterministic ingredients of the Gaussian limit process
///   L(t) = int_0^t K(t,u) dW(u),  K(t,u) = r(u) Z(u) - (t-u) d/du[r Z](u),
/// which packages the limit's martingale term and the integrated drift term
/// behind a single kernel.  The covariance is then a plain quadrature and the
/// law is exactly sampleable; euler_path provides the independent
/// discretization cross-check of the same law.
class LimitBundle {
 public:
  LimitBundle(const Curve& curve, const MetricSpec& metric,
              std::shared_ptr<const FrameField> frames, double r_min_guard = 1e-10);

  /// K(t,u) for 0 <= u <= t <= 1; throws OutOfOrder for u > t.
  Vec3 kernel(double t, double u) const;

  /// Cov(L(t1), L(t2)) = int_0^{min} K(t1,u) K(t2,u)^T du, composite Gauss
  /// (64 panels x order 32).
  Mat3 covariance(double t1, double t2) const;

  /// Full (3G)x(3G) covariance of (L(t))_{t in grid}.
  Eigen::MatrixXd covariance_matrix(std::span<const double> t_grid) const;

  /// M exact Gaussian draws on the grid, row-major M x 3G; reproducible per
  /// seed, sample j regenerable in isolation.  Directions with identically
  /// zero variance come out exactly 0.  Throws NotPSD when the factorization
  /// tolerance (1e-12 x trace) is exceeded.
  std::vector<double> sample(std::span<const double> t_grid, int samples,
                             std::uint64_t seed) const;

  /// One Euler path of the limit on {j/m}: simulates the Brownian increments
  /// and forms the two Ito sums plus the outer Riemann sum directly from the
  /// limit's defining expression.  Cross-oracle only.
  std::vector<Vec3> euler_path(int resolution, std::uint64_t seed) const;

  const Curve& curve() const { return curve_; }
  const MetricSpec& metric() const { return metric_; }
  const FrameField& frames() const { return *frames_; }
  double r_min_guard() const { return r_min_guard_; }

 private:
  void kernel_parts(double u, Vec3& a, Vec3& b) const;  // a = rZ, b = (rZ)'

  Curve curve_;
  MetricSpec metric_;
  std::shared_ptr<const FrameField> frames_;
  double r_min_guard_;
};

}  // namespace corrugate::limitlaw
