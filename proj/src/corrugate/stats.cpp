// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#include "corrugate/stats.hpp"

#include <algorithm>
#include <cmath>

#include "corrugate/errors.hpp"
#include "corrugate/quadrature.hpp"

namespace corrugate::stats {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(Errc::out_of_domain, "quantile argument must be in (0,1)");
  // Acklam's rational approximation as the seed
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // two Halley refinements against the exact CDF
  for (int it = 0; it < 2; ++it) {
    const double e = normal_cdf(x) - p;
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    const double u = e / pdf;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 1e-8) return 1.0;
  if (lambda < 0.757) {
    // theta-function inversion; converges fast where the alternating
    // series does not
    const double v = M_PI * M_PI / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int i = 1; i <= 7; i += 2) sum += std::exp(-v * i * i);
    return std::clamp(1.0 - std::sqrt(2.0 * M_PI) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

Moments empirical_moments(std::span<const double> data, int samples, int dim) {
  if (samples < 2) fail(Errc::too_few_samples, "moments need at least 2 samples");
  if (dim < 1 || data.size() != static_cast<size_t>(samples) * dim)
    fail(Errc::shape_mismatch, "moments: data size does not match samples * dim");

  Moments m;
  m.samples = samples;
  m.dim = dim;
  m.mean = Eigen::VectorXd::Zero(dim);
  m.covariance = Eigen::MatrixXd::Zero(dim, dim);
  m.standard_error = Eigen::MatrixXd::Zero(dim, dim);

  std::vector<quad::Kahan> mean_acc(static_cast<size_t>(dim));
  for (int s = 0; s < samples; ++s)
    for (int i = 0; i < dim; ++i)
      mean_acc[static_cast<size_t>(i)].add(data[static_cast<size_t>(s) * dim + i]);
  for (int i = 0; i < dim; ++i) m.mean(i) = mean_acc[static_cast<size_t>(i)].value() / samples;

  std::vector<quad::Kahan> cov_acc(static_cast<size_t>(dim) * dim);
  std::vector<double> centered(static_cast<size_t>(dim));
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < dim; ++i)
      centered[static_cast<size_t>(i)] = data[static_cast<size_t>(s) * dim + i] - m.mean(i);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j)
        cov_acc[static_cast<size_t>(i) * dim + j].add(centered[static_cast<size_t>(i)] *
                                                      centered[static_cast<size_t>(j)]);
  }
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      const double v = cov_acc[static_cast<size_t>(i) * dim + j].value() / (samples - 1);
      m.covariance(i, j) = v;
      m.covariance(j, i) = v;
    }
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      m.standard_error(i, j) = std::sqrt(
          (m.covariance(i, i) * m.covariance(j, j) + m.covariance(i, j) * m.covariance(i, j)) /
          (samples - 1));
  return m;
}

GofResult ks_gof(std::span<const double> sample, double null_sigma) {
  if (sample.size() < 20) fail(Errc::too_few_samples, "KS test needs at least 20 samples");
  if (!(null_sigma > 0.0)) fail(Errc::invalid_argument, "null sigma must be positive");

  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());

  GofResult res;
  res.sample_size = static_cast<int>(xs.size());
  res.null_sigma = null_sigma;

  double dmax = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf(xs[i] / null_sigma);
    dmax = std::max(dmax, (static_cast<double>(i) + 1.0) / n - f);
    dmax = std::max(dmax, f - static_cast<double>(i) / n);
  }
  res.statistic = dmax;
  res.p_value = kolmogorov_sf(std::sqrt(n) * dmax);
  res.degenerate = xs.front() == xs.back();
  return res;
}

RateFit rate_fit(std::span<const int> ns, std::span<const double> values) {
  if (ns.size() < 4) fail(Errc::insufficient_points, "rate fit needs at least 4 points");
  if (ns.size() != values.size()) fail(Errc::shape_mismatch, "rate fit: ns/values size mismatch");
  for (size_t i = 0; i + 1 < ns.size(); ++i)
    if (!(ns[i] < ns[i + 1])) fail(Errc::invalid_argument, "rate fit: ns must be strictly increasing");
  for (double v : values)
    if (!(v > 0.0)) fail(Errc::non_positive_value, "rate fit requires positive values");

  RateFit fit;
  fit.ns.assign(ns.begin(), ns.end());
  fit.values.assign(values.begin(), values.end());

  const size_t m = ns.size();
  double sx = 0.0, sy = 0.0;
  std::vector<double> lx(m), ly(m);
  for (size_t i = 0; i < m; ++i) {
    lx[i] = std::log(static_cast<double>(ns[i]));
    ly[i] = std::log(values[i]);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssres = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ssres += e * e;
  }
  fit.r_squared = syy <= 1e-300 ? 1.0 : 1.0 - ssres / syy;
  return fit;
}

CovarianceReport covariance_comparison(const Eigen::MatrixXd& empirical,
                                       const Eigen::MatrixXd& oracle,
                                       const Eigen::MatrixXd& standard_errors, double k_sigma) {
  if (empirical.rows() != oracle.rows() || empirical.cols() != oracle.cols() ||
      empirical.rows() != standard_errors.rows() || empirical.cols() != standard_errors.cols())
    fail(Errc::shape_mismatch, "covariance comparison: shapes do not match");
  if (!(k_sigma > 0.0)) fail(Errc::invalid_argument, "k_sigma must be positive");

  CovarianceReport rep;
  rep.oracle = oracle;
  rep.empirical = empirical;
  rep.standard_errors = standard_errors;
  rep.k_sigma = k_sigma;
  rep.pass.resize(empirical.rows(), empirical.cols());
  for (Eigen::Index i = 0; i < empirical.rows(); ++i)
    for (Eigen::Index j = 0; j < empirical.cols(); ++j) {
      const double dev = std::abs(empirical(i, j) - oracle(i, j));
      const double se = standard_errors(i, j);
      const bool ok = dev <= k_sigma * se;
      rep.pass(i, j) = ok;
      if (!ok) rep.all_pass = false;
      const double standardized = se > 0.0 ? dev / se : (dev > 0.0 ? HUGE_VAL : 0.0);
      rep.worst_deviation = std::max(rep.worst_deviation, standardized);
    }
  return rep;
}

}  // namespace corrugate::stats
