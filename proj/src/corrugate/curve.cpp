// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#include "corrugate/curve.hpp"

#include <algorithm>
#include <cmath>

#include "corrugate/errors.hpp"

namespace corrugate::geometry {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;

double require(const std::map<std::string, double>& params, const std::string& key,
               const std::string& entry) {
  auto it = params.find(key);
  if (it == params.end())
    fail(Errc::missing_parameter, "catalog entry '" + entry + "' requires parameter '" + key + "'");
  return it->second;
}

double optional(const std::map<std::string, double>& params, const std::string& key, double dflt) {
  auto it = params.find(key);
  return it == params.end() ? dflt : it->second;
}

void check_domain(double u) {
  if (!(u >= 0.0 && u <= 1.0)) fail(Errc::out_of_domain, "curve parameter outside [0,1]");
}

std::vector<double> poly_component(const std::map<std::string, double>& params, char axis) {
  std::vector<double> coeffs;
  for (const auto& [key, value] : params) {
    if (key.size() < 2 || key[0] != axis) continue;
    const int k = std::stoi(key.substr(1));
    if (k < 0) fail(Errc::invalid_argument, "negative polynomial degree");
    if (static_cast<size_t>(k) >= coeffs.size()) coeffs.resize(k + 1, 0.0);
    coeffs[k] = value;
  }
  return coeffs;
}

double poly_eval(const std::vector<double>& c, double u, int order) {
  double acc = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= order; --k) {
    double factor = 1.0;
    for (int m = 0; m < order; ++m) factor *= (k - m);
    acc = acc * u + factor * c[k];
  }
  return acc;
}

}  // namespace

const char* to_string(CurveKind k) {
  switch (k) {
    case CurveKind::line: return "line";
    case CurveKind::circle: return "circle";
    case CurveKind::helix: return "helix";
    case CurveKind::polynomial: return "polynomial";
    case CurveKind::tabulated: return "tabulated";
  }
  return "?";
}

// Natural cubic spline per component over arbitrary strictly increasing knots.
struct Curve::Spline {
  std::vector<double> us;
  std::vector<Vec3> values;
  std::vector<Vec3> second;  // second derivatives at knots

  static std::shared_ptr<const Spline> build(std::vector<double> us, std::vector<Vec3> pts) {
    const size_t n = us.size();
    if (n < 4) fail(Errc::invalid_argument, "tabulated curve needs at least 4 samples");
    if (pts.size() != n) fail(Errc::length_mismatch, "tabulated curve: us/points size mismatch");
    for (size_t i = 0; i + 1 < n; ++i)
      if (!(us[i] < us[i + 1]))
        fail(Errc::invalid_argument, "tabulated curve knots must be strictly increasing");
    if (us.front() < 0.0 || us.back() > 1.0)
      fail(Errc::out_of_domain, "tabulated curve knots must lie in [0,1]");

    auto sp = std::make_shared<Spline>();
    sp->us = std::move(us);
    sp->values = std::move(pts);
    sp->second.assign(n, Vec3::Zero());

    // tridiagonal solve per component, natural end conditions
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0);
    std::vector<Vec3> d(n, Vec3::Zero());
    b[0] = b[n - 1] = 1.0;
    for (size_t i = 1; i + 1 < n; ++i) {
      const double h0 = sp->us[i] - sp->us[i - 1];
      const double h1 = sp->us[i + 1] - sp->us[i];
      a[i] = h0 / 6.0;
      b[i] = (h0 + h1) / 3.0;
      c[i] = h1 / 6.0;
      d[i] = (sp->values[i + 1] - sp->values[i]) / h1 - (sp->values[i] - sp->values[i - 1]) / h0;
    }
    // Thomas algorithm
    for (size_t i = 1; i < n; ++i) {
      const double m = a[i] / b[i - 1];
      b[i] -= m * c[i - 1];
      d[i] -= m * d[i - 1];
    }
    sp->second[n - 1] = d[n - 1] / b[n - 1];
    for (size_t i = n - 1; i-- > 0;) sp->second[i] = (d[i] - c[i] * sp->second[i + 1]) / b[i];
    return sp;
  }

  Vec3 eval(double u, int order) const {
    if (order > 2)
      fail(Errc::order_unsupported, "tabulated curve: derivatives beyond order 2 unsupported");
    if (u < us.front() || u > us.back())
      fail(Errc::out_of_domain, "tabulated curve evaluated outside knot range");
    const auto it = std::upper_bound(us.begin(), us.end(), u);
    size_t i = static_cast<size_t>(std::max<std::ptrdiff_t>(1, it - us.begin())) - 1;
    i = std::min(i, us.size() - 2);
    const double h = us[i + 1] - us[i];
    const double t1 = (us[i + 1] - u) / h;
    const double t2 = (u - us[i]) / h;
    switch (order) {
      case 0:
        return t1 * values[i] + t2 * values[i + 1] +
               ((t1 * t1 * t1 - t1) * second[i] + (t2 * t2 * t2 - t2) * second[i + 1]) * (h * h) /
                   6.0;
      case 1:
        return (values[i + 1] - values[i]) / h +
               (-(3.0 * t1 * t1 - 1.0) * second[i] + (3.0 * t2 * t2 - 1.0) * second[i + 1]) * h /
                   6.0;
      default:
        return t1 * second[i] + t2 * second[i + 1];
    }
  }
};

Curve Curve::catalog(const std::string& name, const std::map<std::string, double>& params) {
  Curve c;
  c.params_ = params;
  if (name == "line") {
    c.kind_ = CurveKind::line;
    c.direction_ =
        Vec3(require(params, "dx", name), require(params, "dy", name), require(params, "dz", name));
    c.origin_ = Vec3(optional(params, "ox", 0.0), optional(params, "oy", 0.0),
                     optional(params, "oz", 0.0));
    if (c.direction_.norm() == 0.0) fail(Errc::irregular_curve, "line direction must be nonzero");
  } else if (name == "circle") {
    c.kind_ = CurveKind::circle;
    c.radius_ = require(params, "radius", name);
    if (c.radius_ <= 0.0) fail(Errc::invalid_argument, "circle radius must be positive");
  } else if (name == "helix") {
    c.kind_ = CurveKind::helix;
    c.helix_a_ = require(params, "a", name);
    c.helix_b_ = require(params, "b", name);
    if (c.helix_a_ <= 0.0) fail(Errc::invalid_argument, "helix radius a must be positive");
  } else if (name == "polynomial") {
    c.kind_ = CurveKind::polynomial;
    c.px_ = poly_component(params, 'x');
    c.py_ = poly_component(params, 'y');
    c.pz_ = poly_component(params, 'z');
    if (c.px_.empty() && c.py_.empty() && c.pz_.empty())
      fail(Errc::missing_parameter, "polynomial curve needs coefficients (x0.., y0.., z0..)");
  } else {
    fail(Errc::unknown_catalog_entry, "unknown catalog curve '" + name + "'");
  }
  return c;
}

Curve Curve::tabulated(std::vector<double> us, std::vector<Vec3> points) {
  Curve c;
  c.kind_ = CurveKind::tabulated;
  c.spline_ = Spline::build(std::move(us), std::move(points));
  return c;
}

Vec3 Curve::derivative(double u, int order) const {
  if (order < 0 || order > 3) fail(Errc::order_unsupported, "derivative order must be 0..3");
  check_domain(u);
  switch (kind_) {
    case CurveKind::line:
      if (order == 0) return origin_ + u * direction_;
      if (order == 1) return direction_;
      return Vec3::Zero();
    case CurveKind::circle: {
      const double w = kTwoPi;
      const double cs = std::cos(w * u), sn = std::sin(w * u);
      const double s = radius_ * std::pow(w, order);
      switch (order) {
        case 0: return Vec3(radius_ * cs, radius_ * sn, 0.0);
        case 1: return Vec3(-s * sn, s * cs, 0.0);
        case 2: return Vec3(-s * cs, -s * sn, 0.0);
        default: return Vec3(s * sn, -s * cs, 0.0);
      }
    }
    case CurveKind::helix: {
      const double w = kTwoPi;
      const double cs = std::cos(w * u), sn = std::sin(w * u);
      const double s = helix_a_ * std::pow(w, order);
      switch (order) {
        case 0: return Vec3(helix_a_ * cs, helix_a_ * sn, helix_b_ * u);
        case 1: return Vec3(-s * sn, s * cs, helix_b_);
        case 2: return Vec3(-s * cs, -s * sn, 0.0);
        default: return Vec3(s * sn, -s * cs, 0.0);
      }
    }
    case CurveKind::polynomial:
      return Vec3(poly_eval(px_, u, order), poly_eval(py_, u, order), poly_eval(pz_, u, order));
    case CurveKind::tabulated:
      return spline_->eval(u, order);
  }
  fail(Errc::internal, "unreachable curve kind");
}

}  // namespace corrugate::geometry
