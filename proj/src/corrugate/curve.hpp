// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace corrugate::geometry {

using Vec3 = Eigen::Vector3d;

enum class CurveKind { line, circle, helix, polynomial, tabulated };

const char* to_string(CurveKind k);

/// A regular curve f0 : [0,1] -> R^3 with derivatives up to order 3.
///
/// Catalog entries are analytic; tabulated curves interpolate samples with a
/// natural cubic spline (derivatives up to order 2 only).
class Curve {
 public:
  /// Catalog constructor.  Known entries and parameters:
  ///   line:       dx, dy, dz (direction), optional ox, oy, oz (origin)
  ///   circle:     radius
  ///   helix:      a (radius), b (pitch)
  ///   polynomial: x0..xK, y0..yK, z0..zK (coefficients of u^k per component)
  static Curve catalog(const std::string& name, const std::map<std::string, double>& params);

  static Curve tabulated(std::vector<double> us, std::vector<Vec3> points);

  Vec3 evaluate(double u) const { return derivative(u, 0); }

  /// order 0..3; throws OrderUnsupported beyond the representation's
  /// smoothness and OutOfDomain for u outside [0,1].
  Vec3 derivative(double u, int order) const;

  double speed(double u) const { return derivative(u, 1).norm(); }
  double speed_squared(double u) const { return derivative(u, 1).squaredNorm(); }

  CurveKind kind() const { return kind_; }
  const std::map<std::string, double>& params() const { return params_; }

 private:
  Curve() = default;

  CurveKind kind_ = CurveKind::line;
  std::map<std::string, double> params_;

  // line/circle/helix scratch
  Vec3 origin_ = Vec3::Zero();
  Vec3 direction_ = Vec3::Zero();
  double radius_ = 0.0;
  double helix_a_ = 0.0;
  double helix_b_ = 0.0;

  // polynomial coefficients per component
  std::vector<double> px_, py_, pz_;

  // tabulated spline (shared so Curve stays cheap to copy)
  struct Spline;
  std::shared_ptr<const Spline> spline_;
};

}  // namespace corrugate::geometry
