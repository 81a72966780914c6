// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#include "corrugate/frame.hpp"

#include <algorithm>
#include <cmath>

#include "corrugate/errors.hpp"

namespace corrugate::geometry {

namespace {

Vec3 unit_tangent(const Curve& curve, double u) {
  const Vec3 v = curve.derivative(u, 1);
  const double s = v.norm();
  if (s == 0.0) fail(Errc::irregular_curve, "curve has vanishing derivative at u=" + std::to_string(u));
  return v / s;
}

// Project y into the plane normal to x and normalize.
Vec3 orthonormalize(const Vec3& y, const Vec3& x) {
  Vec3 p = y - y.dot(x) * x;
  const double n = p.norm();
  if (n == 0.0) fail(Errc::internal, "degenerate frame projection");
  return p / n;
}

}  // namespace

double Frame::orthonormality_defect() const {
  double d = 0.0;
  d = std::max(d, std::abs(X.dot(Y)));
  d = std::max(d, std::abs(X.dot(Z)));
  d = std::max(d, std::abs(Y.dot(Z)));
  d = std::max(d, std::abs(X.norm() - 1.0));
  d = std::max(d, std::abs(Y.norm() - 1.0));
  d = std::max(d, std::abs(Z.norm() - 1.0));
  return d;
}

Frame frenet_frame(const Curve& curve, double u, double kappa_min) {
  const Vec3 v = curve.derivative(u, 1);
  const double speed = v.norm();
  if (speed == 0.0) fail(Errc::irregular_curve, "curve irregular at u=" + std::to_string(u));
  const Vec3 x = v / speed;
  const Vec3 acc = curve.derivative(u, 2);
  const Vec3 acc_normal = acc - acc.dot(x) * x;
  const double kappa = acc_normal.norm() / (speed * speed);
  if (kappa < kappa_min)
    fail(Errc::curvature_vanishes,
         "curvature " + std::to_string(kappa) + " below threshold at u=" + std::to_string(u));
  Frame f;
  f.X = x;
  f.Y = acc_normal.normalized();
  f.Z = x.cross(f.Y).normalized();
  return f;
}

Frame FrameField::double_reflection_step(const Curve& curve, double u0, const Frame& from,
                                         double u1) {
  if (u1 == u0) return from;
  const Vec3 p0 = curve.evaluate(u0);
  const Vec3 p1 = curve.evaluate(u1);
  const Vec3 t0 = from.X;
  const Vec3 t1 = unit_tangent(curve, u1);

  Frame out;
  out.X = t1;
  const Vec3 v1 = p1 - p0;
  const double c1 = v1.squaredNorm();
  if (c1 < 1e-300) {
    out.Y = orthonormalize(from.Y, t1);
    out.Z = out.X.cross(out.Y).normalized();
    return out;
  }
  const Vec3 rl = from.Y - (2.0 / c1) * v1.dot(from.Y) * v1;
  const Vec3 tl = t0 - (2.0 / c1) * v1.dot(t0) * v1;
  const Vec3 v2 = t1 - tl;
  const double c2 = v2.squaredNorm();
  Vec3 y1 = c2 < 1e-300 ? rl : Vec3(rl - (2.0 / c2) * v2.dot(rl) * v2);
  out.Y = orthonormalize(y1, t1);
  out.Z = out.X.cross(out.Y).normalized();
  return out;
}

Vec3 FrameField::auto_normal(const Curve& curve, double u0) {
  try {
    return frenet_frame(curve, u0).Y;
  } catch (const Error&) {
    const Vec3 x = unit_tangent(curve, u0);
    int k = 0;
    double best = std::abs(x[0]);
    for (int i = 1; i < 3; ++i)
      if (std::abs(x[i]) < best) {
        best = std::abs(x[i]);
        k = i;
      }
    return orthonormalize(Vec3::Unit(k), x);
  }
}

FrameField FrameField::rmf(const Curve& curve, std::vector<double> nodes,
                           const Vec3& initial_normal) {
  if (nodes.empty()) fail(Errc::invalid_argument, "frame field needs at least one node");
  for (size_t i = 0; i + 1 < nodes.size(); ++i)
    if (!(nodes[i] < nodes[i + 1]))
      fail(Errc::invalid_argument, "frame field nodes must be strictly increasing");
  if (nodes.front() < 0.0 || nodes.back() > 1.0)
    fail(Errc::out_of_domain, "frame field nodes must lie in [0,1]");

  FrameField field(curve, FrameMethod::rotation_minimizing);
  field.nodes_ = std::move(nodes);
  field.frames_.reserve(field.nodes_.size());

  const Vec3 x0 = unit_tangent(curve, field.nodes_.front());
  const double nn = initial_normal.norm();
  if (nn == 0.0) fail(Errc::non_orthogonal_seed, "initial normal must be nonzero");
  if (std::abs(initial_normal.dot(x0)) / nn > 1e-9)
    fail(Errc::non_orthogonal_seed, "initial normal not orthogonal to the tangent");

  Frame f;
  f.X = x0;
  f.Y = orthonormalize(initial_normal, x0);
  f.Z = f.X.cross(f.Y).normalized();
  field.frames_.push_back(f);
  for (size_t i = 1; i < field.nodes_.size(); ++i) {
    f = double_reflection_step(curve, field.nodes_[i - 1], f, field.nodes_[i]);
    field.frames_.push_back(f);
  }
  return field;
}

FrameField FrameField::rmf_auto(const Curve& curve, std::vector<double> nodes) {
  if (nodes.empty()) fail(Errc::invalid_argument, "frame field needs at least one node");
  const Vec3 seed = auto_normal(curve, nodes.front());
  return rmf(curve, std::move(nodes), seed);
}

FrameField FrameField::frenet(const Curve& curve, std::vector<double> nodes) {
  if (nodes.empty()) fail(Errc::invalid_argument, "frame field needs at least one node");
  for (size_t i = 0; i + 1 < nodes.size(); ++i)
    if (!(nodes[i] < nodes[i + 1]))
      fail(Errc::invalid_argument, "frame field nodes must be strictly increasing");
  FrameField field(curve, FrameMethod::frenet);
  field.nodes_ = std::move(nodes);
  field.frames_.reserve(field.nodes_.size());
  for (double u : field.nodes_) field.frames_.push_back(frenet_frame(curve, u));
  return field;
}

Frame FrameField::at(double u) const {
  if (u < nodes_.front() - 1e-12 || u > nodes_.back() + 1e-12)
    fail(Errc::out_of_domain, "frame field evaluated outside its node range");
  u = std::clamp(u, nodes_.front(), nodes_.back());
  if (method_ == FrameMethod::frenet) return frenet_frame(curve_, u);
  // anchor at the last chain node <= u
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), u);
  const size_t i = static_cast<size_t>(std::max<std::ptrdiff_t>(1, it - nodes_.begin())) - 1;
  if (nodes_[i] == u) return frames_[i];
  return double_reflection_step(curve_, nodes_[i], frames_[i], u);
}

}  // namespace corrugate::geometry
