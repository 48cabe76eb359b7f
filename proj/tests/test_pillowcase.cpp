#include <cmath>

#include "doctest.h"
#include "dubois/pillowcase.hpp"
#include "dubois/rep.hpp"

using namespace dubois;

namespace {
const double kS = std::sqrt(3.0) / 2.0;
}

TEST_CASE("canonicalization is exactly idempotent") {
  RngStream rng(3);
  for (int i = 0; i < 2000; ++i) {
    const double l = rng.uniform(-10.0, 10.0);
    const double m = rng.uniform(-10.0, 10.0);
    const PillowcasePoint once = canonicalize(l, m);
    const PillowcasePoint twice = canonicalize(once.theta_l, once.theta_m);
    CHECK(once.theta_l == twice.theta_l);
    CHECK(once.theta_m == twice.theta_m);
    CHECK(once.theta_m >= 0.0);
    CHECK(once.theta_m <= kPi);
  }
  for (double m : {0.0, kPi, -kPi, -0.0}) {
    for (double l : {0.4, -0.4, kPi, -kPi, 0.0}) {
      const PillowcasePoint once = canonicalize(l, m);
      const PillowcasePoint twice = canonicalize(once.theta_l, once.theta_m);
      CHECK(once.theta_l == twice.theta_l);
      CHECK(once.theta_m == twice.theta_m);
      CHECK(once.theta_l >= 0.0);  // edge rule
    }
  }
}

TEST_CASE("canonicalization quotients the hyperelliptic involution exactly") {
  RngStream rng(5);
  for (int i = 0; i < 2000; ++i) {
    const double l = rng.uniform(-7.0, 7.0);
    const double m = rng.uniform(-7.0, 7.0);
    const PillowcasePoint a = canonicalize(l, m);
    const PillowcasePoint b = canonicalize(-l, -m);
    CHECK(a.theta_l == b.theta_l);
    CHECK(a.theta_m == b.theta_m);
  }
}

TEST_CASE("restriction of the trefoil family to the boundary torus") {
  const Presentation p = builtin_presentation("trefoil");

  // theta_m = pi/2 at t = pi/2 (the meridian trace vanishes there).
  const BoundaryRestriction mid = restrict_to_torus(p, builtin_trefoil_path(kPi / 2));
  CHECK_FALSE(mid.corner);
  CHECK(mid.point.theta_m == doctest::Approx(kPi / 2).epsilon(1e-12));

  for (int i = 0; i < 50; ++i) {
    const double t = kPi * (i + 0.5) / 50.0;
    const RepresentationPoint rep = builtin_trefoil_path(t);
    const BoundaryRestriction r = restrict_to_torus(p, rep);
    // Trace coordinates.
    const double trm = evaluate_word(p.meridian, rep.images).trace();
    const double trl = evaluate_word(p.longitude, rep.images).trace();
    CHECK(2 * std::cos(r.point.theta_m) == doctest::Approx(trm).epsilon(1e-9));
    CHECK(2 * std::cos(r.point.theta_l) == doctest::Approx(trl).epsilon(1e-9));
    // The A-polynomial relation l m^6 = -1.
    CHECK(std::abs(std::cos(r.point.theta_l + 6 * r.point.theta_m) + 1.0) <= 1e-8);
  }
}

TEST_CASE("restriction is conjugation invariant") {
  const Presentation p = builtin_presentation("trefoil");
  RngStream rng(11);
  for (int i = 0; i < 20; ++i) {
    const double t = rng.uniform(0.1, kPi - 0.1);
    const RepresentationPoint rep = builtin_trefoil_path(t);
    const BoundaryRestriction a = restrict_to_torus(p, rep);
    const BoundaryRestriction b =
        restrict_to_torus(p, conjugate_representation(rep, haar_sample(rng)));
    CHECK(a.point.theta_l == doctest::Approx(b.point.theta_l).epsilon(1e-9));
    CHECK(a.point.theta_m == doctest::Approx(b.point.theta_m).epsilon(1e-9));
  }
}

TEST_CASE("corner points are flagged, non-commuting images rejected") {
  Presentation p = builtin_presentation("trefoil");

  // Trivial representation: both boundary images central.
  const RepresentationPoint trivial{{Quat::identity(), Quat::identity()}, 0.0};
  const BoundaryRestriction corner = restrict_to_torus(p, trivial);
  CHECK(corner.corner);
  CHECK(corner.point.theta_m == 0.0);

  // Doctor the boundary words so the images do not commute.
  p.meridian = parse_word("x", p.generator_names);
  p.longitude = parse_word("y", p.generator_names);
  const RepresentationPoint bad{{Quat(0, 1, 0, 0), Quat(0, 0, 1, 0)}, 0.0};
  CHECK_THROWS_AS(restrict_to_torus(p, bad), NonCommuting);
}

TEST_CASE("pillowcase evaluation agrees with the trace evaluation") {
  const Presentation p = builtin_presentation("trefoil");
  const PeripheralFunction c0 = PeripheralFunction::make({{1.0, 0, 0}});
  CHECK(evaluate_on_pillowcase(c0, {0.3, 1.2}) == doctest::Approx(2.0));

  const PeripheralFunction lm6 = PeripheralFunction::make({{1.0, 1, 6}});
  RngStream rng(13);
  for (int i = 0; i < 30; ++i) {
    const double t = rng.uniform(0.05, kPi - 0.05);
    const RepresentationPoint rep =
        conjugate_representation(builtin_trefoil_path(t), haar_sample(rng));
    const BoundaryRestriction r = restrict_to_torus(p, rep);
    CHECK(evaluate_on_pillowcase(lm6, r.point) == doctest::Approx(-2.0).epsilon(1e-9));

    // Random symmetric Laurent function: both evaluation routes agree.
    std::vector<PeripheralFunction::Term> terms;
    for (int j = 0; j < 3; ++j) {
      terms.push_back({rng.uniform(-2.0, 2.0), static_cast<int>(rng.next_u64() % 4) - 1,
                       static_cast<int>(rng.next_u64() % 9) - 4});
    }
    const PeripheralFunction f = PeripheralFunction::make(terms);
    const double via_traces = evaluate_peripheral(f, p, rep);
    const double via_angles = evaluate_on_pillowcase(f, r.point);
    CHECK(via_angles == doctest::Approx(via_traces).epsilon(1e-9));
  }
}

TEST_CASE("A-ideal residuals on the trefoil image") {
  const Presentation p = builtin_presentation("trefoil");
  std::vector<RepresentationPoint> sample;
  for (int i = 0; i < 200; ++i) {
    sample.push_back(builtin_trefoil_path(kPi * (i + 0.5) / 200.0));
  }
  const std::vector<PeripheralFunction> candidates{
      parse_peripheral_terms("1:1:0,1:0:6"),   // l + l^-1 + m^6 + m^-6
      parse_peripheral_terms("1:1:1,1:0:5"),   // l m + l^-1 m^-1 + m^5 + m^-5
      parse_peripheral_terms("1:1:0"),         // l + l^-1: not in the ideal
  };
  const std::vector<double> residuals = a_ideal_residual(p, candidates, sample);
  REQUIRE(residuals.size() == 3);
  CHECK(residuals[0] <= 1e-8);
  CHECK(residuals[1] <= 1e-8);
  CHECK(residuals[2] >= 0.5);
}
