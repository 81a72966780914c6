// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "corrugate/errors.hpp"
#include "corrugate/metric.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace corrugate;
using geometry::Vec3;
using metric::amplitude_field_derivative;
using metric::MetricSpec;
using metric::residual_amplitude;
using metric::shortness_report;

TEST_CASE("shortness report on lines and the helix") {
  const auto g1 = MetricSpec::constant(1.0);
  const auto rep = shortness_report(testutil::line_half(), g1, 64);
  CHECK(rep.min_margin == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rep.is_strictly_short);

  const auto unit_line =
      geometry::Curve::catalog("line", {{"dx", 1.0}, {"dy", 0.0}, {"dz", 0.0}});
  const auto rep2 = shortness_report(unit_line, g1, 64);
  CHECK(rep2.min_margin == 0.0);
  CHECK_FALSE(rep2.is_strictly_short);

  // margin of the default helix against g = 2 from the speed formula
  const auto rep3 = shortness_report(testutil::helix_default(), MetricSpec::constant(2.0), 4096);
  const double margin = std::sqrt(2.0) - std::sqrt(std::pow(0.2 * M_PI, 2) + 0.0025);
  CHECK(rep3.is_strictly_short);
  CHECK(rep3.min_margin == doctest::Approx(margin).epsilon(1e-12));
}

TEST_CASE("residual amplitude") {
  const auto line = testutil::line_half();
  CHECK(residual_amplitude(line, MetricSpec::constant(1.0), 0.3) ==
        doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));
  // exactly isometric: r = 0
  CHECK(residual_amplitude(line, MetricSpec::constant(0.25), 0.3) == 0.0);
  CHECK_THROWS_AS(residual_amplitude(line, MetricSpec::constant(0.2), 0.3), Error);
}

TEST_CASE("pythagorean identity and monotonicity in g") {
  const auto helix = testutil::helix_default();
  for (double gval : {0.5, 1.0, 2.0, 7.5}) {
    const auto g = MetricSpec::constant(gval);
    const auto gplus = MetricSpec::constant(gval + 0.125);
    for (int i = 0; i <= 32; ++i) {
      const double u = i / 32.0;
      const double r = residual_amplitude(helix, g, u);
      const double total = r * r + helix.speed_squared(u);
      CHECK(std::abs(total - gval) <= 1e-14 * gval);
      CHECK(residual_amplitude(helix, gplus, u) >= r);
    }
  }
}

TEST_CASE("metric kinds and positivity validation") {
  const auto poly = MetricSpec::polynomial({0.25, 0.0, 1.0});
  CHECK(poly.value(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(poly.g_min() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(MetricSpec::polynomial({1.0, -2.0}), Error);  // hits zero on [0,1]
  CHECK_THROWS_AS(MetricSpec::constant(0.0), Error);

  std::vector<double> us, gs;
  for (int i = 0; i <= 16; ++i) {
    us.push_back(i / 16.0);
    gs.push_back(2.0 + 0.1 * std::sin(us.back()));
  }
  const auto tab = MetricSpec::tabulated(us, gs);
  CHECK(tab.value(0.5) == doctest::Approx(2.0 + 0.1 * std::sin(0.5)).epsilon(1e-4));
}

TEST_CASE("amplitude field derivative") {
  const auto line = testutil::line_half();
  const auto field = testutil::line_field();

  SUBCASE("constant r, constant Z gives the zero vector exactly") {
    const auto g = MetricSpec::constant(1.25);
    const Vec3 d = amplitude_field_derivative(line, g, *field, 0.4);
    CHECK(d.norm() == 0.0);
  }

  SUBCASE("r(u) = u on a straight line differentiates to e3") {
    // g = speed^2 + u^2 makes r(u) = u; Z is constant e3
    const auto g = MetricSpec::polynomial({0.25, 0.0, 1.0});
    const Vec3 d = amplitude_field_derivative(line, g, *field, 0.6);
    CHECK((d - Vec3(0, 0, 1)).norm() <= 1e-7);
  }

  SUBCASE("step halving is self-consistent") {
    const auto g = MetricSpec::polynomial({0.3, 0.2, 0.5});
    metric::AmplitudeDerivOptions h1, h2;
    h1.step = 1e-5;
    h2.step = 5e-6;
    const Vec3 a = amplitude_field_derivative(line, g, *field, 0.37, h1);
    const Vec3 b = amplitude_field_derivative(line, g, *field, 0.37, h2);
    CHECK((a - b).norm() <= 1e-8);
  }

  SUBCASE("degenerate amplitude and boundary are errors") {
    const auto iso = MetricSpec::constant(0.25);  // r == 0
    CHECK_THROWS_AS(amplitude_field_derivative(line, iso, *field, 0.5), Error);
    const auto g = MetricSpec::constant(1.25);
    CHECK_THROWS_AS(amplitude_field_derivative(line, g, *field, 0.0), Error);
    CHECK_THROWS_AS(amplitude_field_derivative(line, g, *field, 1.0), Error);
    // near-boundary evaluation shrinks the step instead of failing
    CHECK(amplitude_field_derivative(line, g, *field, 1e-6).norm() == 0.0);
  }
}
