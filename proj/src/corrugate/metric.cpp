// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#include "corrugate/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "corrugate/errors.hpp"

namespace corrugate::metric {

// Same natural-spline machinery as tabulated curves, scalar-valued.
struct MetricSpec::Spline {
  std::vector<double> us, values, second;

  static std::shared_ptr<const Spline> build(std::vector<double> us, std::vector<double> gs) {
    const size_t n = us.size();
    if (n < 4) fail(Errc::invalid_argument, "tabulated metric needs at least 4 samples");
    if (gs.size() != n) fail(Errc::length_mismatch, "tabulated metric: us/gs size mismatch");
    for (size_t i = 0; i + 1 < n; ++i)
      if (!(us[i] < us[i + 1]))
        fail(Errc::invalid_argument, "tabulated metric knots must be strictly increasing");
    if (us.front() > 0.0 || us.back() < 1.0)
      fail(Errc::invalid_argument, "tabulated metric must cover [0,1]");

    auto sp = std::make_shared<Spline>();
    sp->us = std::move(us);
    sp->values = std::move(gs);
    sp->second.assign(n, 0.0);
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    b[0] = b[n - 1] = 1.0;
    for (size_t i = 1; i + 1 < n; ++i) {
      const double h0 = sp->us[i] - sp->us[i - 1];
      const double h1 = sp->us[i + 1] - sp->us[i];
      a[i] = h0 / 6.0;
      b[i] = (h0 + h1) / 3.0;
      c[i] = h1 / 6.0;
      d[i] = (sp->values[i + 1] - sp->values[i]) / h1 - (sp->values[i] - sp->values[i - 1]) / h0;
    }
    for (size_t i = 1; i < n; ++i) {
      const double m = a[i] / b[i - 1];
      b[i] -= m * c[i - 1];
      d[i] -= m * d[i - 1];
    }
    sp->second[n - 1] = d[n - 1] / b[n - 1];
    for (size_t i = n - 1; i-- > 0;) sp->second[i] = (d[i] - c[i] * sp->second[i + 1]) / b[i];
    return sp;
  }

  double eval(double u) const {
    const auto it = std::upper_bound(us.begin(), us.end(), u);
    size_t i = static_cast<size_t>(std::max<std::ptrdiff_t>(1, it - us.begin())) - 1;
    i = std::min(i, us.size() - 2);
    const double h = us[i + 1] - us[i];
    const double t1 = (us[i + 1] - u) / h;
    const double t2 = (u - us[i]) / h;
    return t1 * values[i] + t2 * values[i + 1] +
           ((t1 * t1 * t1 - t1) * second[i] + (t2 * t2 * t2 - t2) * second[i + 1]) * (h * h) / 6.0;
  }
};

void MetricSpec::validate_positive(int grid) {
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    const double u = static_cast<double>(i) / (grid - 1);
    lo = std::min(lo, value(u));
  }
  if (!(lo > 0.0))
    fail(Errc::non_positive_value, "metric must be positive on [0,1]; observed min " +
                                       std::to_string(lo));
  g_min_ = lo;
}

MetricSpec MetricSpec::constant(double g) {
  MetricSpec m;
  m.kind_ = MetricKind::constant;
  m.coeffs_ = {g};
  m.validate_positive(2);
  return m;
}

MetricSpec MetricSpec::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) fail(Errc::invalid_argument, "polynomial metric needs coefficients");
  MetricSpec m;
  m.kind_ = MetricKind::polynomial;
  m.coeffs_ = std::move(coeffs);
  m.validate_positive(4096);
  return m;
}

MetricSpec MetricSpec::tabulated(std::vector<double> us, std::vector<double> gs) {
  MetricSpec m;
  m.kind_ = MetricKind::tabulated;
  m.spline_ = Spline::build(std::move(us), std::move(gs));
  m.validate_positive(4096);
  return m;
}

double MetricSpec::value(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) fail(Errc::out_of_domain, "metric parameter outside [0,1]");
  switch (kind_) {
    case MetricKind::constant:
      return coeffs_[0];
    case MetricKind::polynomial: {
      double acc = 0.0;
      for (size_t k = coeffs_.size(); k-- > 0;) acc = acc * u + coeffs_[k];
      return acc;
    }
    case MetricKind::tabulated:
      return spline_->eval(u);
  }
  fail(Errc::internal, "unreachable metric kind");
}

ShortnessReport shortness_report(const Curve& curve, const MetricSpec& metric, int grid) {
  if (grid < 2) fail(Errc::invalid_argument, "shortness grid must have at least 2 nodes");
  ShortnessReport rep;
  rep.grid_size = grid;
  rep.min_margin = std::numeric_limits<double>::infinity();
  bool regular = true;
  for (int i = 0; i < grid; ++i) {
    const double u = static_cast<double>(i) / (grid - 1);
    const double speed = curve.speed(u);
    if (speed <= 0.0) regular = false;
    const double margin = std::sqrt(metric.value(u)) - speed;
    if (margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.argmin_u = u;
    }
  }
  rep.is_strictly_short = regular && rep.min_margin > 0.0;
  return rep;
}

double residual_amplitude(const Curve& curve, const MetricSpec& metric, double u) {
  const double g = metric.value(u);
  const double s2 = curve.speed_squared(u);
  if (g < s2 - 1e-12)
    fail(Errc::not_short, "curve is not short at u=" + std::to_string(u) + " (g=" +
                              std::to_string(g) + " < speed^2=" + std::to_string(s2) + ")");
  return std::sqrt(std::max(0.0, g - s2));
}

Vec3 amplitude_field_derivative(const Curve& curve, const MetricSpec& metric,
                                const FrameField& frames, double u,
                                const AmplitudeDerivOptions& opts) {
  if (!(u > 0.0 && u < 1.0))
    fail(Errc::out_of_domain, "amplitude derivative needs u interior to (0,1)");
  const double r0 = residual_amplitude(curve, metric, u);
  if (r0 <= opts.r_min)
    fail(Errc::amplitude_degenerate,
         "residual amplitude " + std::to_string(r0) + " too small for differentiation");

  const double h = std::min({opts.step, 0.5 * u, 0.5 * (1.0 - u)});
  const auto field_value = [&](double v) -> Vec3 {
    return residual_amplitude(curve, metric, v) * frames.at(v).Z;
  };
  const auto central = [&](double step) -> Vec3 {
    return (field_value(u + step) - field_value(u - step)) / (2.0 * step);
  };
  const Vec3 d_h = central(h);
  const Vec3 d_h2 = central(0.5 * h);
  return (4.0 * d_h2 - d_h) / 3.0;  // one Richardson extrapolation
}

}  // namespace corrugate::metric
