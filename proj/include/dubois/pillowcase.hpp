#pragma once

#include "dubois/torsion.hpp"

namespace dubois {

// Eigen-angle pair (theta_l, theta_m) in the canonical fundamental domain of
// the pillowcase: theta_m in [0, pi]; on the edges theta_m in {0, pi} also
// theta_l in [0, pi].
struct PillowcasePoint {
  double theta_l = 0.0;
  double theta_m = 0.0;
};

// Quotient by the hyperelliptic involution (theta_l, theta_m) ~ (-theta_l,
// -theta_m); exactly idempotent.
PillowcasePoint canonicalize(double theta_l, double theta_m);

struct BoundaryRestriction {
  PillowcasePoint point;
  bool corner = false;  // both boundary images central
};

// Restriction of a representation to the boundary torus. The common rotation
// axis is taken from whichever of rho(mu), rho(lambda) has the larger
// imaginary part; angles are signed about that axis. Throws NonCommuting when
// the boundary images fail to commute (commutator norm > 1e-8).
BoundaryRestriction restrict_to_torus(const Presentation& p, const RepresentationPoint& rep);

// sum_i c_i 2 cos(p theta_l + q theta_m).
double evaluate_on_pillowcase(const PeripheralFunction& f, const PillowcasePoint& pt);

// Per candidate, max over the sample of |f(restrict(point))|.
std::vector<double> a_ideal_residual(const Presentation& p,
                                     const std::vector<PeripheralFunction>& candidates,
                                     const std::vector<RepresentationPoint>& sample);

}  // namespace dubois
