// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "corrugate/curve.hpp"
#include "corrugate/frame.hpp"
#include "corrugate/metric.hpp"
#include "corrugate/quadrature.hpp"

namespace corrugate::twist {

using geometry::Curve;
using geometry::Frame;
using geometry::FrameField;
using geometry::Vec3;
using metric::MetricSpec;

/// n Rademacher signs; either drawn from the counter generator (seeded) or
/// supplied explicitly.
struct SignSequence {
  int n = 0;
  std::vector<std::int8_t> signs;
  std::optional<std::uint64_t> seed;

  static SignSequence sample(int n, std::uint64_t seed);
  static SignSequence from_signs(std::vector<std::int8_t> signs);

  int at(int k) const { return signs[static_cast<size_t>(k)]; }  // X_{k+1}, k in [0,n)
};

enum class PhaseMode { deterministic, random };

/// The phase H(u): H(u) = n u in deterministic mode; in random mode the
/// piecewise-linear graph H(u) = S_k + n X_{k+1} (u - k/n) on [k/n,(k+1)/n),
/// hitting the walk S_k at every breakpoint.
class PhasePath {
 public:
  static PhasePath deterministic(int n);
  static PhasePath random(int n, SignSequence signs);

  double value(double u) const;  // H(u)
  int frequency() const { return n_; }
  PhaseMode mode() const { return mode_; }
  int sign(int k) const {  // slope sign on subinterval k
    return mode_ == PhaseMode::deterministic ? 1 : signs_.at(k);
  }
  long walk(int k) const { return walk_[static_cast<size_t>(k)]; }  // S_k
  const SignSequence& signs() const { return signs_; }

 private:
  PhasePath(int n, PhaseMode mode) : n_(n), mode_(mode) {}

  int n_;
  PhaseMode mode_;
  SignSequence signs_;       // empty in deterministic mode
  std::vector<long> walk_;   // S_0..S_n
};

/// Everything about a twist family that does not depend on the signs.
///
/// On subinterval k the phase fraction is x = n(u - k/n) and, because H hits
/// integers at breakpoints, cos(2 pi H) = cos(2 pi x) and
/// sin(2 pi H) = X_{k+1} sin(2 pi x).  All quadrature of the displacement
/// integrand therefore factors into sign-free vector integrals; ensembles
/// share one skeleton and apply signs per sample.
class TwistSkeleton {
 public:
  TwistSkeleton(const Curve& curve, const MetricSpec& metric,
                std::shared_ptr<const FrameField> frames, int n, int quadrature_order);

  int n() const { return n_; }
  int quadrature_order() const { return q_; }
  double scale() const { return scale_; }  // 2 pi n^{3/2}
  const Curve& curve() const { return curve_; }
  const MetricSpec& metric() const { return metric_; }

  /// Frame used by the twist integrand.  Rotation-minimizing fields are
  /// re-anchored on the n breakpoints so the integrand is smooth on every
  /// quadrature panel and independent of the quadrature layout.
  Frame frame(double u) const;

  /// r(u) Y(u) and r(u) Z(u).
  void channel_values(double u, Vec3& rY, Vec3& rZ) const;

  const Vec3& base_point(int k) const { return base_points_[static_cast<size_t>(k)]; }
  const Vec3& cos_full(int k) const { return cos_full_[static_cast<size_t>(k)]; }
  const Vec3& sin_full(int k) const { return sin_full_[static_cast<size_t>(k)]; }
  const Vec3& outer_cos_panel(int k) const { return outer_cos_panel_[static_cast<size_t>(k)]; }
  const Vec3& outer_sin_panel(int k) const { return outer_sin_panel_[static_cast<size_t>(k)]; }
  const Vec3& cos_drift(int k) const { return cos_drift_[static_cast<size_t>(k)]; }
  const Vec3& outer_cos_prefix(int k) const { return outer_cos_[static_cast<size_t>(k)]; }

  /// Twist displacement integrals over [k/n, k/n + tau], tau in [0, 1/n]:
  /// pcos = int r Y cos(2 pi n (u-k/n)) du, psin likewise with sin (the
  /// caller multiplies psin by the subinterval sign).
  void partial_inner(int k, double tau, Vec3& pcos, Vec3& psin) const;

  /// Same split for the outer integral int_{k/n}^{k/n+tau} of the partial
  /// inner antiderivatives.
  void partial_outer(int k, double tau, Vec3& opc, Vec3& oqs) const;

  struct GridPoint {
    double t = 0.0;
    int k = 0;        // floor(n t), clamped to n
    double tau = 0.0; // t - k/n
    Vec3 outer_partial_cos = Vec3::Zero();
    Vec3 outer_partial_sin = Vec3::Zero();  // coefficient of X_{k+1}
  };
  GridPoint plan(double t) const;

 private:
  Curve curve_;
  MetricSpec metric_;
  std::shared_ptr<const FrameField> caller_frames_;
  std::optional<FrameField> anchored_frames_;  // RMF re-anchored at breakpoints
  int n_;
  int q_;
  double len_;    // 1/n
  double scale_;  // 2 pi n^{3/2}

  std::vector<Vec3> base_points_;                       // f0(k/n), k = 0..n
  std::vector<Vec3> cos_full_, sin_full_;               // C_k, S_k, k = 0..n-1
  std::vector<Vec3> outer_cos_panel_, outer_sin_panel_; // P_k, Q_k
  std::vector<Vec3> cos_drift_, outer_cos_;             // prefixes, k = 0..n
  std::vector<double> trig_cos_, trig_sin_;             // cos/sin(2 pi x_j)
};

/// The twisted map f_n for one phase path over a shared skeleton.
class TwistedMap {
 public:
  TwistedMap(std::shared_ptr<const TwistSkeleton> skeleton, PhasePath phase);

  Vec3 evaluate(double t) const;                          // f_n(t)
  Vec3 base(double t) const { return skel_->curve().evaluate(t); }
  Vec3 displacement(double t) const;                      // f_n(t) - f0(t)
  Vec3 breakpoint_value(int k) const;                     // cached f_n(k/n)

  /// max over a uniform grid of |  |f_n'|^2 - g | / g, with f_n' evaluated
  /// analytically from the twist formula.
  double isometry_defect(int grid) const;
  double isometry_defect_at(double u) const;

  /// max over a uniform grid (grid >= n nodes) of |f_n - f0|.
  double sup_difference(int grid) const;

  /// D_n(t) = 2 pi n^{3/2} int_0^t (f_n - f0) ds on a sorted grid in [0,1].
  std::vector<Vec3> scaled_difference(std::span<const double> t_grid) const;

  /// D_n split into its deterministic cos (Y) channel and sign-dependent
  /// sin (Z) channel; cos + sin = scaled_difference.
  void scaled_difference_parts(std::span<const double> t_grid, std::vector<Vec3>& cos_part,
                               std::vector<Vec3>& sin_part) const;

  const TwistSkeleton& skeleton() const { return *skel_; }
  const std::shared_ptr<const TwistSkeleton>& skeleton_ptr() const { return skel_; }
  const PhasePath& phase() const { return phase_; }
  const Vec3& sin_drift(int k) const { return sin_drift_[static_cast<size_t>(k)]; }

  /// Readout of D_n at a preplanned grid point, shared with the ensemble
  /// runner: needs only the prefix rows at plan.k.
  static Vec3 readout(const TwistSkeleton& skel, const TwistSkeleton::GridPoint& plan,
                      const Vec3& outer_cos_prefix, const Vec3& cos_drift,
                      const Vec3& outer_sin_prefix, const Vec3& sin_drift, int sign, Vec3* cos_out,
                      Vec3* sin_out);

 private:
  std::shared_ptr<const TwistSkeleton> skel_;
  PhasePath phase_;
  std::vector<Vec3> sin_drift_, outer_sin_;  // per-map prefixes, k = 0..n
};

/// Convenience builder matching the one-shot construction contract.
TwistedMap build_twisted_map(const Curve& curve, const MetricSpec& metric,
                             std::shared_ptr<const FrameField> frames, PhasePath phase,
                             int quadrature_order = 16);

}  // namespace corrugate::twist
