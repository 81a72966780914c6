// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "corrugate/curve.hpp"
#include "corrugate/frame.hpp"

namespace corrugate::metric {

using geometry::Curve;
using geometry::FrameField;
using geometry::Vec3;

enum class MetricKind { constant, polynomial, tabulated };

/// Target metric g(u) dt^2 on [0,1]; g is validated positive on a dense grid
/// at construction and the observed lower bound is recorded as g_min.
class MetricSpec {
 public:
  static MetricSpec constant(double g);
  /// coefficients of g(u) = c0 + c1 u + ... + ck u^k
  static MetricSpec polynomial(std::vector<double> coeffs);
  static MetricSpec tabulated(std::vector<double> us, std::vector<double> gs);

  double value(double u) const;
  double g_min() const { return g_min_; }
  MetricKind kind() const { return kind_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

 private:
  MetricSpec() = default;
  void validate_positive(int grid);

  MetricKind kind_ = MetricKind::constant;
  std::vector<double> coeffs_;
  struct Spline;
  std::shared_ptr<const Spline> spline_;
  double g_min_ = 0.0;
};

struct ShortnessReport {
  double min_margin = 0.0;  // min over grid of sqrt(g) - |f0'|
  double argmin_u = 0.0;
  bool is_strictly_short = false;
  int grid_size = 0;
};

/// Margins evaluated on a uniform grid of `grid` nodes including both ends.
/// Non-shortness is reported, never thrown.
ShortnessReport shortness_report(const Curve& curve, const MetricSpec& metric, int grid);

/// r(u) = sqrt(g(u) - |f0'(u)|^2).  Values of g below speed^2 by more than
/// 1e-12 throw NotShort; within tolerance the amplitude clamps to 0.
double residual_amplitude(const Curve& curve, const MetricSpec& metric, double u);

struct AmplitudeDerivOptions {
  double step = 1e-5;
  double r_min = 1e-10;
};

/// d/du of u -> r(u) Z(u), by Richardson-extrapolated central differences.
/// The step shrinks near the interval ends; u in {0,1} is OutOfDomain and
/// r(u) <= r_min is AmplitudeDegenerate.
Vec3 amplitude_field_derivative(const Curve& curve, const MetricSpec& metric,
                                const FrameField& frames, double u,
                                const AmplitudeDerivOptions& opts = {});

}  // namespace corrugate::metric
