// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "corrugate/quadrature.hpp"
#include "doctest.h"

using corrugate::quad::gauss_legendre;
using corrugate::quad::Kahan;

namespace {
double integrate(int order, double (*f)(double)) {
  const auto& rule = gauss_legendre(order);
  double acc = 0.0;
  for (int j = 0; j < order; ++j) acc += rule.weights[static_cast<size_t>(j)] * f(rule.nodes[static_cast<size_t>(j)]);
  return acc;
}
}  // namespace

TEST_CASE("weights sum to one") {
  for (int q : {2, 4, 16, 32, 64}) {
    const auto& rule = gauss_legendre(q);
    double s = 0.0;
    for (double w : rule.weights) s += w;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("polynomial exactness up to degree 2q-1") {
  // integral of x^7 over [0,1] with a 4-point rule
  CHECK(integrate(4, [](double x) { return x * x * x * x * x * x * x; }) ==
        doctest::Approx(0.125).epsilon(1e-14));
  CHECK(integrate(2, [](double x) { return x * x * x; }) ==
        doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("order 16 resolves one full oscillation to machine precision") {
  // the twist integrand completes exactly one period per subinterval; these
  // integrals are the reason a fixed order suffices uniformly in n
  CHECK(std::abs(integrate(16, [](double x) { return std::cos(2 * M_PI * x); })) < 1e-15);
  CHECK(std::abs(integrate(16, [](double x) { return std::sin(2 * M_PI * x); })) < 1e-15);
  CHECK(integrate(16, [](double x) { return x * std::sin(2 * M_PI * x); }) ==
        doctest::Approx(-1.0 / (2 * M_PI)).epsilon(1e-14));
}

TEST_CASE("compensated summation survives cancellation") {
  Kahan acc;
  acc.add(1.0);
  acc.add(1e100);
  acc.add(1.0);
  acc.add(-1e100);
  CHECK(acc.value() == 2.0);

  Kahan tiny;
  tiny.add(1.0);
  for (int i = 0; i < 10'000'000; ++i) tiny.add(1e-17);
  CHECK(tiny.value() == doctest::Approx(1.0 + 1e-10).epsilon(1e-12));
}
