// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <vector>

namespace corrugate::quad {

using Vec3 = Eigen::Vector3d;

// Gauss-Legendre rule mapped to [0,1]; weights sum to 1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order() const { return static_cast<int>(nodes.size()); }
};

// Rules are cached per order; thread-safe.
const GaussRule& gauss_legendre(int order);

// Neumaier-compensated scalar accumulator.
class Kahan {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class KahanVec3 {
 public:
  void add(const Vec3& v) {
    x_.add(v.x());
    y_.add(v.y());
    z_.add(v.z());
  }
  Vec3 value() const { return Vec3(x_.value(), y_.value(), z_.value()); }

 private:
  Kahan x_, y_, z_;
};

}  // namespace corrugate::quad
