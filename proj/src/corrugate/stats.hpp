// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace corrugate::stats {

double normal_cdf(double x);
/// Inverse of normal_cdf, accurate to ~1e-15 (rational seed + Halley polish).
double normal_quantile(double p);
/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_sf(double lambda);

struct Moments {
  int samples = 0;
  int dim = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;       // unbiased (M-1)
  Eigen::MatrixXd standard_error;   // normal-theory SE per covariance entry
};

/// Sample mean and unbiased covariance of M row-major dim-vectors, with
/// SE(c_ij) = sqrt((c_ii c_jj + c_ij^2)/(M-1)).  Throws TooFewSamples for
/// M < 2.
Moments empirical_moments(std::span<const double> data, int samples, int dim);

struct GofResult {
  double statistic = 0.0;
  double p_value = 0.0;
  int sample_size = 0;
  double null_sigma = 0.0;
  bool degenerate = false;  // zero-variance sample against a nonzero null
};

/// One-sample Kolmogorov-Smirnov test of `sample` against the centered
/// normal with standard deviation null_sigma.
GofResult ks_gof(std::span<const double> sample, double null_sigma);

struct RateFit {
  std::vector<int> ns;
  std::vector<double> values;
  double slope = 0.0;
  double intercept = 0.0;   // in log-log space
  double r_squared = 0.0;
};

/// Least-squares line through (log n, log value); needs >= 4 strictly
/// increasing ns and positive values.
RateFit rate_fit(std::span<const int> ns, std::span<const double> values);

struct CovarianceReport {
  Eigen::MatrixXd oracle;
  Eigen::MatrixXd empirical;
  Eigen::MatrixXd standard_errors;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> pass;
  double k_sigma = 4.0;
  double worst_deviation = 0.0;  // max |emp - oracle| / SE
  bool all_pass = true;
};

/// Entrywise |empirical - oracle| <= k_sigma * SE gate.
CovarianceReport covariance_comparison(const Eigen::MatrixXd& empirical,
                                       const Eigen::MatrixXd& oracle,
                                       const Eigen::MatrixXd& standard_errors, double k_sigma = 4.0);

}  // namespace corrugate::stats
