// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#include "corrugate/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "corrugate/errors.hpp"

namespace corrugate::quad {

namespace {

// Nodes of P_q by Newton iteration on the [-1,1] interval, then mapped to
// [0,1]. Double-precision accurate for the orders used here (q <= 128).
GaussRule compute_rule(int q) {
  GaussRule rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  for (int i = 0; i < q; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        // one extra polish step after convergence
        double q0 = 1.0, q1 = x;
        for (int k = 2; k <= q; ++k) {
          const double q2 = ((2 * k - 1) * x * q1 - (k - 1) * q0) / k;
          q0 = q1;
          q1 = q2;
        }
        dp = q * (x * q1 - q0) / (x * x - 1.0);
        x -= q1 / dp;
        break;
      }
    }
    // map node from [-1,1] to [0,1]; descending x gives ascending node order
    rule.nodes[q - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[q - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 128) fail(Errc::invalid_argument, "gauss_legendre: order out of range");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

}  // namespace corrugate::quad
