// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#include "corrugate/twist.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "corrugate/errors.hpp"
#include "corrugate/rng.hpp"

namespace corrugate::twist {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;
using quad::gauss_legendre;
using quad::GaussRule;
using quad::KahanVec3;
}  // namespace

SignSequence SignSequence::sample(int n, std::uint64_t seed) {
  if (n < 1) fail(Errc::invalid_argument, "sign sequence length must be positive");
  SignSequence s;
  s.n = n;
  s.seed = seed;
  s.signs.resize(static_cast<size_t>(n));
  const rng::CounterRng gen(seed);
  for (int k = 0; k < n; ++k) s.signs[static_cast<size_t>(k)] = static_cast<std::int8_t>(gen.sign(k));
  return s;
}

SignSequence SignSequence::from_signs(std::vector<std::int8_t> signs) {
  if (signs.empty()) fail(Errc::invalid_argument, "sign sequence must be nonempty");
  for (auto v : signs)
    if (v != 1 && v != -1) fail(Errc::invalid_argument, "sign entries must be exactly +1 or -1");
  SignSequence s;
  s.n = static_cast<int>(signs.size());
  s.signs = std::move(signs);
  return s;
}

PhasePath PhasePath::deterministic(int n) {
  if (n < 1) fail(Errc::invalid_argument, "phase frequency must be positive");
  PhasePath p(n, PhaseMode::deterministic);
  p.walk_.resize(static_cast<size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) p.walk_[static_cast<size_t>(k)] = k;
  return p;
}

PhasePath PhasePath::random(int n, SignSequence signs) {
  if (n < 1) fail(Errc::invalid_argument, "phase frequency must be positive");
  if (signs.n != n || static_cast<int>(signs.signs.size()) != n)
    fail(Errc::length_mismatch, "sign sequence length " + std::to_string(signs.n) +
                                    " does not match frequency " + std::to_string(n));
  PhasePath p(n, PhaseMode::random);
  p.signs_ = std::move(signs);
  p.walk_.resize(static_cast<size_t>(n) + 1);
  p.walk_[0] = 0;
  for (int k = 0; k < n; ++k) p.walk_[static_cast<size_t>(k) + 1] = p.walk_[static_cast<size_t>(k)] + p.signs_.at(k);
  return p;
}

double PhasePath::value(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) fail(Errc::out_of_domain, "phase parameter outside [0,1]");
  if (mode_ == PhaseMode::deterministic) return static_cast<double>(n_) * u;
  int k = static_cast<int>(std::floor(u * n_));
  k = std::clamp(k, 0, n_ - 1);
  const double x = u - static_cast<double>(k) / n_;
  return static_cast<double>(walk_[static_cast<size_t>(k)]) + sign(k) * n_ * x;
}

TwistSkeleton::TwistSkeleton(const Curve& curve, const MetricSpec& metric,
                             std::shared_ptr<const FrameField> frames, int n, int quadrature_order)
    : curve_(curve), metric_(metric), caller_frames_(std::move(frames)), n_(n), q_(quadrature_order) {
  if (n_ < 1) fail(Errc::invalid_argument, "twist frequency must be positive");
  if (q_ < 2) fail(Errc::invalid_argument, "quadrature order must be at least 2");
  if (!caller_frames_) fail(Errc::frame_nodes_missing, "twist requires a frame field");
  if (caller_frames_->nodes().front() > 1e-12 || caller_frames_->nodes().back() < 1.0 - 1e-12)
    fail(Errc::frame_nodes_missing, "frame field must cover [0,1]");

  len_ = 1.0 / n_;
  scale_ = kTwoPi * std::pow(static_cast<double>(n_), 1.5);

  // shortness (or exact isometry, which builds the zero twist)
  for (int i = 0; i < 4096; ++i) {
    const double u = static_cast<double>(i) / 4095;
    const double slack = metric_.value(u) - curve_.speed_squared(u);
    if (slack < -1e-12)
      fail(Errc::not_short,
           "curve is not short for the metric at u=" + std::to_string(u) +
               " (g - speed^2 = " + std::to_string(slack) + ")");
  }

  if (caller_frames_->method() == geometry::FrameMethod::rotation_minimizing) {
    std::vector<double> breakpoints(static_cast<size_t>(n_) + 1);
    for (int k = 0; k <= n_; ++k) breakpoints[static_cast<size_t>(k)] = static_cast<double>(k) / n_;
    anchored_frames_ =
        FrameField::rmf(curve_, std::move(breakpoints), caller_frames_->at(0.0).Y);
  }

  const GaussRule& rule = gauss_legendre(q_);
  trig_cos_.resize(rule.nodes.size());
  trig_sin_.resize(rule.nodes.size());
  for (int j = 0; j < q_; ++j) {
    trig_cos_[static_cast<size_t>(j)] = std::cos(kTwoPi * rule.nodes[static_cast<size_t>(j)]);
    trig_sin_[static_cast<size_t>(j)] = std::sin(kTwoPi * rule.nodes[static_cast<size_t>(j)]);
  }

  base_points_.resize(static_cast<size_t>(n_) + 1);
  for (int k = 0; k <= n_; ++k)
    base_points_[static_cast<size_t>(k)] = curve_.evaluate(static_cast<double>(k) / n_);

  cos_full_.assign(static_cast<size_t>(n_), Vec3::Zero());
  sin_full_.assign(static_cast<size_t>(n_), Vec3::Zero());
  outer_cos_panel_.assign(static_cast<size_t>(n_), Vec3::Zero());
  outer_sin_panel_.assign(static_cast<size_t>(n_), Vec3::Zero());

  for (int k = 0; k < n_; ++k) {
    const double a = static_cast<double>(k) / n_;
    Vec3 c = Vec3::Zero(), s = Vec3::Zero();
    for (int j = 0; j < q_; ++j) {
      Vec3 rY, rZ;
      channel_values(a + len_ * rule.nodes[static_cast<size_t>(j)], rY, rZ);
      c += rule.weights[static_cast<size_t>(j)] * trig_cos_[static_cast<size_t>(j)] * rY;
      s += rule.weights[static_cast<size_t>(j)] * trig_sin_[static_cast<size_t>(j)] * rZ;
    }
    cos_full_[static_cast<size_t>(k)] = len_ * c;
    sin_full_[static_cast<size_t>(k)] = len_ * s;

    // outer aggregate: int over the panel of the inner partials
    Vec3 pc = Vec3::Zero(), ps = Vec3::Zero();
    for (int i = 0; i < q_; ++i) {
      Vec3 ic, is;
      partial_inner(k, len_ * rule.nodes[static_cast<size_t>(i)], ic, is);
      pc += rule.weights[static_cast<size_t>(i)] * ic;
      ps += rule.weights[static_cast<size_t>(i)] * is;
    }
    outer_cos_panel_[static_cast<size_t>(k)] = len_ * pc;
    outer_sin_panel_[static_cast<size_t>(k)] = len_ * ps;
  }

  cos_drift_.assign(static_cast<size_t>(n_) + 1, Vec3::Zero());
  outer_cos_.assign(static_cast<size_t>(n_) + 1, Vec3::Zero());
  KahanVec3 drift, outer;
  for (int k = 0; k < n_; ++k) {
    cos_drift_[static_cast<size_t>(k)] = drift.value();
    outer_cos_[static_cast<size_t>(k)] = outer.value();
    outer.add(len_ * cos_drift_[static_cast<size_t>(k)] + outer_cos_panel_[static_cast<size_t>(k)]);
    drift.add(cos_full_[static_cast<size_t>(k)]);
  }
  cos_drift_[static_cast<size_t>(n_)] = drift.value();
  outer_cos_[static_cast<size_t>(n_)] = outer.value();
}

Frame TwistSkeleton::frame(double u) const {
  return anchored_frames_ ? anchored_frames_->at(u) : caller_frames_->at(u);
}

void TwistSkeleton::channel_values(double u, Vec3& rY, Vec3& rZ) const {
  const double r = metric::residual_amplitude(curve_, metric_, u);
  const Frame f = frame(u);
  rY = r * f.Y;
  rZ = r * f.Z;
}

void TwistSkeleton::partial_inner(int k, double tau, Vec3& pcos, Vec3& psin) const {
  pcos = Vec3::Zero();
  psin = Vec3::Zero();
  if (tau <= 0.0) return;
  const GaussRule& rule = gauss_legendre(q_);
  const double a = static_cast<double>(k) / n_;
  const double phase_span = kTwoPi * n_ * tau;
  Vec3 c = Vec3::Zero(), s = Vec3::Zero();
  for (int j = 0; j < q_; ++j) {
    const double x = rule.nodes[static_cast<size_t>(j)];
    Vec3 rY, rZ;
    channel_values(a + tau * x, rY, rZ);
    c += rule.weights[static_cast<size_t>(j)] * std::cos(phase_span * x) * rY;
    s += rule.weights[static_cast<size_t>(j)] * std::sin(phase_span * x) * rZ;
  }
  pcos = tau * c;
  psin = tau * s;
}

void TwistSkeleton::partial_outer(int k, double tau, Vec3& opc, Vec3& oqs) const {
  opc = Vec3::Zero();
  oqs = Vec3::Zero();
  if (tau <= 0.0) return;
  const GaussRule& rule = gauss_legendre(q_);
  Vec3 c = Vec3::Zero(), s = Vec3::Zero();
  for (int i = 0; i < q_; ++i) {
    Vec3 ic, is;
    partial_inner(k, tau * rule.nodes[static_cast<size_t>(i)], ic, is);
    c += rule.weights[static_cast<size_t>(i)] * ic;
    s += rule.weights[static_cast<size_t>(i)] * is;
  }
  opc = tau * c;
  oqs = tau * s;
}

TwistSkeleton::GridPoint TwistSkeleton::plan(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) fail(Errc::out_of_domain, "evaluation parameter outside [0,1]");
  GridPoint gp;
  gp.t = t;
  int k = static_cast<int>(std::floor(t * n_));
  k = std::clamp(k, 0, n_);
  double tau = t - static_cast<double>(k) / n_;
  if (k == n_) tau = 0.0;
  if (tau < 0.0) tau = 0.0;
  gp.k = k;
  gp.tau = tau;
  if (tau > 0.0) partial_outer(k, tau, gp.outer_partial_cos, gp.outer_partial_sin);
  return gp;
}

TwistedMap::TwistedMap(std::shared_ptr<const TwistSkeleton> skeleton, PhasePath phase)
    : skel_(std::move(skeleton)), phase_(std::move(phase)) {
  if (!skel_) fail(Errc::invalid_argument, "twisted map needs a skeleton");
  if (phase_.frequency() != skel_->n())
    fail(Errc::length_mismatch, "phase frequency does not match the skeleton");
  const int n = skel_->n();
  const double len = 1.0 / n;
  sin_drift_.assign(static_cast<size_t>(n) + 1, Vec3::Zero());
  outer_sin_.assign(static_cast<size_t>(n) + 1, Vec3::Zero());
  KahanVec3 drift, outer;
  for (int k = 0; k < n; ++k) {
    sin_drift_[static_cast<size_t>(k)] = drift.value();
    outer_sin_[static_cast<size_t>(k)] = outer.value();
    const double sg = phase_.sign(k);
    outer.add(len * sin_drift_[static_cast<size_t>(k)] + sg * skel_->outer_sin_panel(k));
    drift.add(sg * skel_->sin_full(k));
  }
  sin_drift_[static_cast<size_t>(n)] = drift.value();
  outer_sin_[static_cast<size_t>(n)] = outer.value();
}

Vec3 TwistedMap::breakpoint_value(int k) const {
  return skel_->base_point(k) + skel_->cos_drift(k) + sin_drift_[static_cast<size_t>(k)];
}

Vec3 TwistedMap::displacement(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) fail(Errc::out_of_domain, "evaluation parameter outside [0,1]");
  const int n = skel_->n();
  int k = std::clamp(static_cast<int>(std::floor(t * n)), 0, n);
  double tau = t - static_cast<double>(k) / n;
  if (k == n) tau = 0.0;
  if (tau < 0.0) tau = 0.0;
  Vec3 pcos, psin;
  skel_->partial_inner(k, tau, pcos, psin);
  const double sg = k < n ? phase_.sign(k) : 1.0;
  return skel_->cos_drift(k) + sin_drift_[static_cast<size_t>(k)] + pcos + sg * psin;
}

Vec3 TwistedMap::evaluate(double t) const { return base(t) + displacement(t); }

double TwistedMap::isometry_defect_at(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) fail(Errc::out_of_domain, "evaluation parameter outside [0,1]");
  const int n = skel_->n();
  const int k = std::clamp(static_cast<int>(std::floor(u * n)), 0, n - 1);
  const double x = u * n - k;  // phase fraction in [0,1]
  const double cs = std::cos(kTwoPi * x);
  const double sn = std::sin(kTwoPi * x) * phase_.sign(k);
  const Vec3 v = skel_->curve().derivative(u, 1);
  const double r = metric::residual_amplitude(skel_->curve(), skel_->metric(), u);
  const Frame f = skel_->frame(u);
  const Vec3 d = v + r * (cs * f.Y + sn * f.Z);
  const double g = skel_->metric().value(u);
  return std::abs(d.squaredNorm() - g) / g;
}

double TwistedMap::isometry_defect(int grid) const {
  if (grid < 2) fail(Errc::invalid_argument, "isometry grid must have at least 2 nodes");
  double worst = 0.0;
  for (int i = 0; i < grid; ++i)
    worst = std::max(worst, isometry_defect_at(static_cast<double>(i) / (grid - 1)));
  return worst;
}

double TwistedMap::sup_difference(int grid) const {
  if (grid < skel_->n())
    fail(Errc::invalid_argument, "sup grid must resolve every subinterval (grid >= n)");
  double worst = 0.0;
  for (int i = 0; i < grid; ++i)
    worst = std::max(worst, displacement(static_cast<double>(i) / (grid - 1)).norm());
  return worst;
}

Vec3 TwistedMap::readout(const TwistSkeleton& skel, const TwistSkeleton::GridPoint& plan,
                         const Vec3& outer_cos_prefix, const Vec3& cos_drift,
                         const Vec3& outer_sin_prefix, const Vec3& sin_drift, int sign,
                         Vec3* cos_out, Vec3* sin_out) {
  const Vec3 cos_total =
      outer_cos_prefix + plan.tau * cos_drift + plan.outer_partial_cos;
  const Vec3 sin_total =
      outer_sin_prefix + plan.tau * sin_drift + static_cast<double>(sign) * plan.outer_partial_sin;
  if (cos_out) *cos_out = skel.scale() * cos_total;
  if (sin_out) *sin_out = skel.scale() * sin_total;
  return skel.scale() * (cos_total + sin_total);
}

void TwistedMap::scaled_difference_parts(std::span<const double> t_grid,
                                         std::vector<Vec3>& cos_part,
                                         std::vector<Vec3>& sin_part) const {
  cos_part.clear();
  sin_part.clear();
  cos_part.reserve(t_grid.size());
  sin_part.reserve(t_grid.size());
  double prev = -1.0;
  for (double t : t_grid) {
    if (t < prev) fail(Errc::invalid_argument, "t grid must be sorted");
    prev = t;
    const auto plan = skel_->plan(t);
    const int sg = plan.k < skel_->n() ? phase_.sign(plan.k) : 1;
    Vec3 c, s;
    readout(*skel_, plan, skel_->outer_cos_prefix(plan.k), skel_->cos_drift(plan.k),
            outer_sin_[static_cast<size_t>(plan.k)], sin_drift_[static_cast<size_t>(plan.k)], sg,
            &c, &s);
    cos_part.push_back(c);
    sin_part.push_back(s);
  }
}

std::vector<Vec3> TwistedMap::scaled_difference(std::span<const double> t_grid) const {
  std::vector<Vec3> out;
  out.reserve(t_grid.size());
  double prev = -1.0;
  for (double t : t_grid) {
    if (t < prev) fail(Errc::invalid_argument, "t grid must be sorted");
    prev = t;
    const auto plan = skel_->plan(t);
    const int sg = plan.k < skel_->n() ? phase_.sign(plan.k) : 1;
    out.push_back(readout(*skel_, plan, skel_->outer_cos_prefix(plan.k), skel_->cos_drift(plan.k),
                          outer_sin_[static_cast<size_t>(plan.k)],
                          sin_drift_[static_cast<size_t>(plan.k)], sg, nullptr, nullptr));
  }
  return out;
}

TwistedMap build_twisted_map(const Curve& curve, const MetricSpec& metric,
                             std::shared_ptr<const FrameField> frames, PhasePath phase,
                             int quadrature_order) {
  auto skel = std::make_shared<TwistSkeleton>(curve, metric, std::move(frames), phase.frequency(),
                                              quadrature_order);
  return TwistedMap(std::move(skel), std::move(phase));
}

}  // namespace corrugate::twist
