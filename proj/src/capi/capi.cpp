// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#include "corrugate/corrugate.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "corrugate/curve.hpp"
#include "corrugate/errors.hpp"
#include "corrugate/frame.hpp"
#include "corrugate/limitlaw.hpp"
#include "corrugate/metric.hpp"
#include "corrugate/montecarlo.hpp"
#include "corrugate/stats.hpp"
#include "corrugate/twist.hpp"

namespace {

namespace cg = corrugate;
using cg::Errc;

thread_local std::string g_last_error;

crg_status status_of(Errc code) {
  switch (code) {
    case Errc::invalid_argument:
    case Errc::unknown_catalog_entry:
    case Errc::missing_parameter:
    case Errc::length_mismatch:
    case Errc::too_few_samples:
    case Errc::insufficient_points:
    case Errc::shape_mismatch:
    case Errc::non_positive_value:
      return CRG_ERR_INVALID;
    case Errc::order_unsupported:
    case Errc::curvature_vanishes:
    case Errc::non_orthogonal_seed:
    case Errc::irregular_curve:
    case Errc::out_of_domain:
    case Errc::not_short:
    case Errc::amplitude_degenerate:
    case Errc::frame_nodes_missing:
    case Errc::out_of_order:
      return CRG_ERR_DOMAIN;
    case Errc::too_large:
    case Errc::resource_budget:
      return CRG_ERR_TOO_LARGE;
    case Errc::not_psd:
      return CRG_ERR_NOT_PSD;
    case Errc::internal:
      return CRG_ERR_INTERNAL;
  }
  return CRG_ERR_INTERNAL;
}

template <typename Fn>
crg_status guarded(Fn&& fn) {
  try {
    fn();
    return CRG_OK;
  } catch (const cg::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CRG_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CRG_ERR_INTERNAL;
  }
}

void require_arg(bool ok, const char* what) {
  if (!ok) cg::fail(Errc::invalid_argument, what);
}

}  // namespace

struct crg_curve {
  cg::geometry::Curve value;
};
struct crg_metric {
  cg::metric::MetricSpec value;
};
struct crg_frames {
  std::shared_ptr<const cg::geometry::FrameField> value;
};
struct crg_phase {
  cg::twist::PhasePath value;
};
struct crg_map {
  cg::twist::TwistedMap value;
};
struct crg_ensemble {
  cg::mc::Ensemble value;
};
struct crg_enumeration {
  cg::mc::ExactLaw law;
  std::shared_ptr<const cg::twist::TwistSkeleton> skeleton;
};
struct crg_bundle {
  cg::limitlaw::LimitBundle value;
};

extern "C" {

const char* crg_last_error(void) { return g_last_error.c_str(); }
const char* crg_version(void) { return "corrugate 0.1.0"; }

/* ----------------------------------------------------------------- curves */

crg_status crg_curve_create(const char* kind, const char* const* param_keys,
                            const double* param_values, size_t param_count, crg_curve** out) {
  return guarded([&] {
    require_arg(kind && out, "kind and out must be non-null");
    require_arg(param_count == 0 || (param_keys && param_values),
                "parameter arrays must be non-null");
    std::map<std::string, double> params;
    for (size_t i = 0; i < param_count; ++i) params[param_keys[i]] = param_values[i];
    *out = new crg_curve{cg::geometry::Curve::catalog(kind, params)};
  });
}

crg_status crg_curve_create_tabulated(const double* us, const double* points_xyz, size_t count,
                                      crg_curve** out) {
  return guarded([&] {
    require_arg(us && points_xyz && out, "arguments must be non-null");
    std::vector<double> u(us, us + count);
    std::vector<cg::geometry::Vec3> pts(count);
    for (size_t i = 0; i < count; ++i)
      pts[i] = cg::geometry::Vec3(points_xyz[3 * i], points_xyz[3 * i + 1], points_xyz[3 * i + 2]);
    *out = new crg_curve{cg::geometry::Curve::tabulated(std::move(u), std::move(pts))};
  });
}

void crg_curve_destroy(crg_curve* curve) { delete curve; }

crg_status crg_curve_derivative(const crg_curve* curve, double u, int order, double out3[3]) {
  return guarded([&] {
    require_arg(curve && out3, "arguments must be non-null");
    const auto v = curve->value.derivative(u, order);
    out3[0] = v.x();
    out3[1] = v.y();
    out3[2] = v.z();
  });
}

/* ----------------------------------------------------------------- frames */

crg_status crg_frames_build(const crg_curve* curve, int method, const double* nodes,
                            size_t node_count, const double* initial_normal3, crg_frames** out) {
  return guarded([&] {
    require_arg(curve && nodes && out, "arguments must be non-null");
    std::vector<double> ns(nodes, nodes + node_count);
    using cg::geometry::FrameField;
    FrameField field = [&] {
      if (method == 1) return FrameField::frenet(curve->value, std::move(ns));
      if (initial_normal3)
        return FrameField::rmf(
            curve->value, std::move(ns),
            cg::geometry::Vec3(initial_normal3[0], initial_normal3[1], initial_normal3[2]));
      return FrameField::rmf_auto(curve->value, std::move(ns));
    }();
    *out = new crg_frames{std::make_shared<const FrameField>(std::move(field))};
  });
}

void crg_frames_destroy(crg_frames* frames) { delete frames; }

crg_status crg_frames_eval(const crg_frames* frames, double u, double out9[9]) {
  return guarded([&] {
    require_arg(frames && out9, "arguments must be non-null");
    const auto f = frames->value->at(u);
    for (int i = 0; i < 3; ++i) {
      out9[i] = f.X(i);
      out9[3 + i] = f.Y(i);
      out9[6 + i] = f.Z(i);
    }
  });
}

crg_status crg_frenet_frame(const crg_curve* curve, double u, double out9[9]) {
  return guarded([&] {
    require_arg(curve && out9, "arguments must be non-null");
    const auto f = cg::geometry::frenet_frame(curve->value, u);
    for (int i = 0; i < 3; ++i) {
      out9[i] = f.X(i);
      out9[3 + i] = f.Y(i);
      out9[6 + i] = f.Z(i);
    }
  });
}

/* ----------------------------------------------------------------- metric */

crg_status crg_metric_create(const char* kind, const double* coeffs, size_t coeff_count,
                             crg_metric** out) {
  return guarded([&] {
    require_arg(kind && out && (coeff_count == 0 || coeffs), "arguments must be non-null");
    const std::string k = kind;
    if (k == "const") {
      require_arg(coeff_count == 1, "const metric takes exactly one coefficient");
      *out = new crg_metric{cg::metric::MetricSpec::constant(coeffs[0])};
    } else if (k == "poly") {
      *out = new crg_metric{
          cg::metric::MetricSpec::polynomial(std::vector<double>(coeffs, coeffs + coeff_count))};
    } else {
      cg::fail(Errc::unknown_catalog_entry, "unknown metric kind '" + k + "'");
    }
  });
}

crg_status crg_metric_create_tabulated(const double* us, const double* gs, size_t count,
                                       crg_metric** out) {
  return guarded([&] {
    require_arg(us && gs && out, "arguments must be non-null");
    *out = new crg_metric{cg::metric::MetricSpec::tabulated(std::vector<double>(us, us + count),
                                                            std::vector<double>(gs, gs + count))};
  });
}

void crg_metric_destroy(crg_metric* metric) { delete metric; }

crg_status crg_metric_eval(const crg_metric* metric, double u, double* out) {
  return guarded([&] {
    require_arg(metric && out, "arguments must be non-null");
    *out = metric->value.value(u);
  });
}

crg_status crg_shortness(const crg_curve* curve, const crg_metric* metric, int grid,
                         crg_shortness_report* out) {
  return guarded([&] {
    require_arg(curve && metric && out, "arguments must be non-null");
    const auto rep = cg::metric::shortness_report(curve->value, metric->value, grid);
    out->min_margin = rep.min_margin;
    out->argmin_u = rep.argmin_u;
    out->is_strictly_short = rep.is_strictly_short ? 1 : 0;
    out->grid_size = rep.grid_size;
  });
}

crg_status crg_residual_amplitude(const crg_curve* curve, const crg_metric* metric, double u,
                                  double* out) {
  return guarded([&] {
    require_arg(curve && metric && out, "arguments must be non-null");
    *out = cg::metric::residual_amplitude(curve->value, metric->value, u);
  });
}

crg_status crg_amplitude_derivative(const crg_curve* curve, const crg_metric* metric,
                                    const crg_frames* frames, double u, double out3[3]) {
  return guarded([&] {
    require_arg(curve && metric && frames && out3, "arguments must be non-null");
    const auto v =
        cg::metric::amplitude_field_derivative(curve->value, metric->value, *frames->value, u);
    out3[0] = v.x();
    out3[1] = v.y();
    out3[2] = v.z();
  });
}

/* ------------------------------------------------------------------ twist */

crg_status crg_phase_deterministic(int n, crg_phase** out) {
  return guarded([&] {
    require_arg(out != nullptr, "out must be non-null");
    *out = new crg_phase{cg::twist::PhasePath::deterministic(n)};
  });
}

crg_status crg_phase_random(int n, uint64_t seed, crg_phase** out) {
  return guarded([&] {
    require_arg(out != nullptr, "out must be non-null");
    *out = new crg_phase{
        cg::twist::PhasePath::random(n, cg::twist::SignSequence::sample(n, seed))};
  });
}

crg_status crg_phase_from_signs(int n, const int8_t* signs, crg_phase** out) {
  return guarded([&] {
    require_arg(signs && out, "arguments must be non-null");
    require_arg(n > 0, "n must be positive");
    std::vector<std::int8_t> s(signs, signs + n);
    *out = new crg_phase{
        cg::twist::PhasePath::random(n, cg::twist::SignSequence::from_signs(std::move(s)))};
  });
}

void crg_phase_destroy(crg_phase* phase) { delete phase; }

crg_status crg_phase_eval(const crg_phase* phase, double u, double* out) {
  return guarded([&] {
    require_arg(phase && out, "arguments must be non-null");
    *out = phase->value.value(u);
  });
}

crg_status crg_phase_signs(const crg_phase* phase, int8_t* out_n) {
  return guarded([&] {
    require_arg(phase && out_n, "arguments must be non-null");
    for (int k = 0; k < phase->value.frequency(); ++k)
      out_n[k] = static_cast<int8_t>(phase->value.sign(k));
  });
}

crg_status crg_map_build(const crg_curve* curve, const crg_metric* metric,
                         const crg_frames* frames, const crg_phase* phase, int quadrature_order,
                         crg_map** out) {
  return guarded([&] {
    require_arg(curve && metric && frames && phase && out, "arguments must be non-null");
    *out = new crg_map{cg::twist::build_twisted_map(curve->value, metric->value, frames->value,
                                                    phase->value,
                                                    quadrature_order > 0 ? quadrature_order : 16)};
  });
}

void crg_map_destroy(crg_map* map) { delete map; }

crg_status crg_map_eval(const crg_map* map, double t, double out3[3]) {
  return guarded([&] {
    require_arg(map && out3, "arguments must be non-null");
    const auto v = map->value.evaluate(t);
    out3[0] = v.x();
    out3[1] = v.y();
    out3[2] = v.z();
  });
}

crg_status crg_map_isometry_defect_at(const crg_map* map, double u, double* out) {
  return guarded([&] {
    require_arg(map && out, "arguments must be non-null");
    *out = map->value.isometry_defect_at(u);
  });
}

crg_status crg_map_isometry_defect(const crg_map* map, int grid, double* out) {
  return guarded([&] {
    require_arg(map && out, "arguments must be non-null");
    *out = map->value.isometry_defect(grid);
  });
}

crg_status crg_map_sup_difference(const crg_map* map, int grid, double* out) {
  return guarded([&] {
    require_arg(map && out, "arguments must be non-null");
    *out = map->value.sup_difference(grid);
  });
}

crg_status crg_map_scaled_difference(const crg_map* map, const double* t, size_t nt, double* out,
                                     double* cos_out, double* sin_out) {
  return guarded([&] {
    require_arg(map && t && out, "arguments must be non-null");
    const auto d = map->value.scaled_difference(std::span<const double>(t, nt));
    for (size_t i = 0; i < nt; ++i)
      for (int c = 0; c < 3; ++c) out[3 * i + c] = d[i](c);
    if (cos_out || sin_out) {
      std::vector<cg::geometry::Vec3> cs, sn;
      map->value.scaled_difference_parts(std::span<const double>(t, nt), cs, sn);
      for (size_t i = 0; i < nt; ++i)
        for (int c = 0; c < 3; ++c) {
          if (cos_out) cos_out[3 * i + c] = cs[i](c);
          if (sin_out) sin_out[3 * i + c] = sn[i](c);
        }
    }
  });
}

/* -------------------------------------------------------------- ensembles */

crg_status crg_ensemble_run(const crg_curve* curve, const crg_metric* metric,
                            const crg_frames* frames, const crg_ensemble_config* config,
                            const double* t_grid, size_t grid_size, crg_ensemble** out) {
  return guarded([&] {
    require_arg(curve && metric && frames && config && t_grid && out,
                "arguments must be non-null");
    cg::mc::ExperimentConfig cfg;
    cfg.n = config->n;
    cfg.samples = config->samples;
    cfg.master_seed = config->master_seed;
    cfg.quadrature_order = config->quadrature_order > 0 ? config->quadrature_order : 16;
    cfg.workers = config->workers;
    switch (config->sign_mode) {
      case 0: cfg.sign_mode = cg::mc::SignMode::random; break;
      case 1: cfg.sign_mode = cg::mc::SignMode::all_plus; break;
      case 2: cfg.sign_mode = cg::mc::SignMode::enumerate_all; break;
      default: cg::fail(Errc::invalid_argument, "unknown sign mode");
    }
    if (config->cost_cap > 0) cfg.cost_cap = config->cost_cap;
    cfg.t_grid.assign(t_grid, t_grid + grid_size);
    *out = new crg_ensemble{cg::mc::run_ensemble(curve->value, metric->value, frames->value, cfg)};
  });
}

void crg_ensemble_destroy(crg_ensemble* ensemble) { delete ensemble; }

crg_status crg_ensemble_size(const crg_ensemble* ensemble, int* samples, int* grid_size) {
  return guarded([&] {
    require_arg(ensemble != nullptr, "ensemble must be non-null");
    if (samples) *samples = ensemble->value.config.samples;
    if (grid_size) *grid_size = ensemble->value.grid_size;
  });
}

const double* crg_ensemble_data(const crg_ensemble* ensemble) {
  return ensemble ? ensemble->value.samples.data() : nullptr;
}

crg_status crg_ensemble_cos_channel(const crg_ensemble* ensemble, double* out) {
  return guarded([&] {
    require_arg(ensemble && out, "arguments must be non-null");
    for (int i = 0; i < ensemble->value.grid_size; ++i)
      for (int c = 0; c < 3; ++c) out[3 * i + c] = ensemble->value.cos_channel[i](c);
  });
}

crg_status crg_ensemble_sample_seed(const crg_ensemble* ensemble, int sample, uint64_t* out) {
  return guarded([&] {
    require_arg(ensemble && out, "arguments must be non-null");
    require_arg(sample >= 0 && sample < ensemble->value.config.samples, "sample index out of range");
    *out = ensemble->value.sample_seeds[static_cast<size_t>(sample)];
  });
}

crg_status crg_ensemble_wall_time(const crg_ensemble* ensemble, double* out) {
  return guarded([&] {
    require_arg(ensemble && out, "arguments must be non-null");
    *out = ensemble->value.wall_time_seconds;
  });
}

/* ------------------------------------------------------------ enumeration */

crg_status crg_enumeration_run(const crg_curve* curve, const crg_metric* metric,
                               const crg_frames* frames, int n, int quadrature_order,
                               const double* t_grid, size_t grid_size, crg_enumeration** out) {
  return guarded([&] {
    require_arg(curve && metric && frames && t_grid && out, "arguments must be non-null");
    const int q = quadrature_order > 0 ? quadrature_order : 16;
    auto law = cg::mc::enumerate_exact(curve->value, metric->value, frames->value, n,
                                       std::span<const double>(t_grid, grid_size), q);
    auto skel = std::make_shared<const cg::twist::TwistSkeleton>(curve->value, metric->value,
                                                                 frames->value, n, q);
    *out = new crg_enumeration{std::move(law), std::move(skel)};
  });
}

void crg_enumeration_destroy(crg_enumeration* enumeration) { delete enumeration; }

crg_status crg_enumeration_outcomes(const crg_enumeration* enumeration, uint64_t* out) {
  return guarded([&] {
    require_arg(enumeration && out, "arguments must be non-null");
    *out = enumeration->law.outcomes;
  });
}

crg_status crg_enumeration_moments(const crg_enumeration* enumeration, double* mean,
                                   double* covariance) {
  return guarded([&] {
    require_arg(enumeration != nullptr, "enumeration must be non-null");
    if (mean)
      std::memcpy(mean, enumeration->law.mean.data(), enumeration->law.mean.size() * sizeof(double));
    if (covariance)
      std::memcpy(covariance, enumeration->law.covariance.data(),
                  enumeration->law.covariance.size() * sizeof(double));
  });
}

crg_status crg_enumeration_outcome(const crg_enumeration* enumeration, uint64_t index,
                                   double* out) {
  return guarded([&] {
    require_arg(enumeration && out, "arguments must be non-null");
    require_arg(index < enumeration->law.outcomes, "outcome index out of range");
    const int n = enumeration->law.n;
    std::vector<std::int8_t> bits(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) bits[static_cast<size_t>(k)] = (index >> k) & 1u ? 1 : -1;
    cg::twist::TwistedMap map(
        enumeration->skeleton,
        cg::twist::PhasePath::random(n, cg::twist::SignSequence::from_signs(std::move(bits))));
    const auto d = map.scaled_difference(enumeration->law.t_grid);
    for (size_t i = 0; i < d.size(); ++i)
      for (int c = 0; c < 3; ++c) out[3 * i + c] = d[i](c);
  });
}

/* -------------------------------------------------------------- limit law */

crg_status crg_bundle_create(const crg_curve* curve, const crg_metric* metric,
                             const crg_frames* frames, double r_min_guard, crg_bundle** out) {
  return guarded([&] {
    require_arg(curve && metric && frames && out, "arguments must be non-null");
    *out = new crg_bundle{cg::limitlaw::LimitBundle(curve->value, metric->value, frames->value,
                                                    r_min_guard > 0 ? r_min_guard : 1e-10)};
  });
}

void crg_bundle_destroy(crg_bundle* bundle) { delete bundle; }

crg_status crg_limit_kernel(const crg_bundle* bundle, double t, double u, double out3[3]) {
  return guarded([&] {
    require_arg(bundle && out3, "arguments must be non-null");
    const auto v = bundle->value.kernel(t, u);
    out3[0] = v.x();
    out3[1] = v.y();
    out3[2] = v.z();
  });
}

crg_status crg_limit_covariance(const crg_bundle* bundle, double t1, double t2, double out9[9]) {
  return guarded([&] {
    require_arg(bundle && out9, "arguments must be non-null");
    const auto m = bundle->value.covariance(t1, t2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out9[3 * i + j] = m(i, j);
  });
}

crg_status crg_limit_covariance_matrix(const crg_bundle* bundle, const double* t_grid,
                                       size_t grid_size, double* out) {
  return guarded([&] {
    require_arg(bundle && t_grid && out, "arguments must be non-null");
    const auto m = bundle->value.covariance_matrix(std::span<const double>(t_grid, grid_size));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
  });
}

crg_status crg_limit_sample(const crg_bundle* bundle, const double* t_grid, size_t grid_size,
                            int samples, uint64_t seed, double* out) {
  return guarded([&] {
    require_arg(bundle && t_grid && out, "arguments must be non-null");
    const auto draws =
        bundle->value.sample(std::span<const double>(t_grid, grid_size), samples, seed);
    std::memcpy(out, draws.data(), draws.size() * sizeof(double));
  });
}

crg_status crg_euler_limit_path(const crg_bundle* bundle, int resolution, uint64_t seed,
                                double* out) {
  return guarded([&] {
    require_arg(bundle && out, "arguments must be non-null");
    const auto path = bundle->value.euler_path(resolution, seed);
    for (size_t i = 0; i < path.size(); ++i)
      for (int c = 0; c < 3; ++c) out[3 * i + c] = path[i](c);
  });
}

/* ------------------------------------------------------------------ stats */

crg_status crg_empirical_moments(const double* data, int samples, int dim, double* mean,
                                 double* covariance, double* standard_errors) {
  return guarded([&] {
    require_arg(data != nullptr, "data must be non-null");
    const auto m = cg::stats::empirical_moments(
        std::span<const double>(data, static_cast<size_t>(samples) * dim), samples, dim);
    if (mean)
      for (int i = 0; i < dim; ++i) mean[i] = m.mean(i);
    if (covariance)
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) covariance[i * dim + j] = m.covariance(i, j);
    if (standard_errors)
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) standard_errors[i * dim + j] = m.standard_error(i, j);
  });
}

crg_status crg_ks_gof(const double* sample, size_t count, double null_sigma, double* statistic,
                      double* p_value, int* degenerate) {
  return guarded([&] {
    require_arg(sample != nullptr, "sample must be non-null");
    const auto res = cg::stats::ks_gof(std::span<const double>(sample, count), null_sigma);
    if (statistic) *statistic = res.statistic;
    if (p_value) *p_value = res.p_value;
    if (degenerate) *degenerate = res.degenerate ? 1 : 0;
  });
}

crg_status crg_rate_fit(const int* ns, const double* values, size_t count, double* slope,
                        double* intercept, double* r_squared) {
  return guarded([&] {
    require_arg(ns && values, "arguments must be non-null");
    const auto fit = cg::stats::rate_fit(std::span<const int>(ns, count),
                                         std::span<const double>(values, count));
    if (slope) *slope = fit.slope;
    if (intercept) *intercept = fit.intercept;
    if (r_squared) *r_squared = fit.r_squared;
  });
}

crg_status crg_covariance_comparison(const double* empirical, const double* oracle,
                                     const double* standard_errors, int dim, double k_sigma,
                                     int* pass, double* worst_deviation, int* all_pass) {
  return guarded([&] {
    require_arg(empirical && oracle && standard_errors, "arguments must be non-null");
    require_arg(dim > 0, "dim must be positive");
    const auto as_matrix = [dim](const double* p) {
      Eigen::MatrixXd m(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = p[i * dim + j];
      return m;
    };
    const auto rep = cg::stats::covariance_comparison(as_matrix(empirical), as_matrix(oracle),
                                                      as_matrix(standard_errors), k_sigma);
    if (pass)
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) pass[i * dim + j] = rep.pass(i, j) ? 1 : 0;
    if (worst_deviation) *worst_deviation = rep.worst_deviation;
    if (all_pass) *all_pass = rep.all_pass ? 1 : 0;
  });
}

crg_status crg_normal_quantile(double p, double* out) {
  return guarded([&] {
    require_arg(out != nullptr, "out must be non-null");
    *out = cg::stats::normal_quantile(p);
  });
}

} /* extern "C" */
