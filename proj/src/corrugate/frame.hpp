// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Geometry>
#include <memory>
#include <vector>

#include "corrugate/curve.hpp"

namespace corrugate::geometry {

/// Orthonormal triple along a curve; X is the unit tangent and (Y,Z) spans
/// the normal plane.
struct Frame {
  Vec3 X, Y, Z;

  double orthonormality_defect() const;
};

/// Frenet-Serret frame at a single parameter.  Throws CurvatureVanishes when
/// the curvature falls below kappa_min (callers fall back to RMF fields).
Frame frenet_frame(const Curve& curve, double u, double kappa_min = 1e-8);

enum class FrameMethod { rotation_minimizing, frenet };

/// Frame field along a curve over a strictly increasing node chain.
///
/// Rotation-minimizing fields march the double-reflection step node to node;
/// evaluation at an off-node parameter takes one exact double-reflection step
/// from the last chain node <= u, which is continuous at the chain nodes and
/// smooth in between.  Frenet fields evaluate analytically at any u.
class FrameField {
 public:
  static FrameField rmf(const Curve& curve, std::vector<double> nodes, const Vec3& initial_normal);
  /// Seeds with the Frenet normal when curvature allows, else a fixed axis
  /// projected into the normal plane.
  static FrameField rmf_auto(const Curve& curve, std::vector<double> nodes);
  static FrameField frenet(const Curve& curve, std::vector<double> nodes);

  /// Default seed normal used by rmf_auto, exposed for reproducibility.
  static Vec3 auto_normal(const Curve& curve, double u0);

  Frame at(double u) const;
  const Frame& at_node(size_t i) const { return frames_[i]; }
  const std::vector<double>& nodes() const { return nodes_; }
  FrameMethod method() const { return method_; }
  const Curve& curve() const { return curve_; }

  /// Single double-reflection transport step of `from` at u0 to u1.
  static Frame double_reflection_step(const Curve& curve, double u0, const Frame& from, double u1);

 private:
  FrameField(const Curve& curve, FrameMethod method) : curve_(curve), method_(method) {}

  Curve curve_;
  FrameMethod method_;
  std::vector<double> nodes_;
  std::vector<Frame> frames_;
};

}  // namespace corrugate::geometry
