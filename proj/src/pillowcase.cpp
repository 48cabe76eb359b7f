#include "dubois/pillowcase.hpp"

#include <cmath>

namespace dubois {

namespace {

// Wrap to (-pi, pi]; exact on in-range inputs, -0 normalized to +0.
double wrap_angle(double x) {
  if (x > -kPi && x <= kPi) return x == 0.0 ? 0.0 : x;
  x = std::fmod(x, 2.0 * kPi);
  if (x <= -kPi) {
    x += 2.0 * kPi;
  } else if (x > kPi) {
    x -= 2.0 * kPi;
  }
  return x == 0.0 ? 0.0 : x;
}

}  // namespace

PillowcasePoint canonicalize(double theta_l, double theta_m) {
  double m = wrap_angle(theta_m);
  double l = wrap_angle(theta_l);
  if (m < 0.0) {
    m = -m;
    l = wrap_angle(-l);
  }
  if ((m == 0.0 || m == kPi) && l < 0.0) l = -l;
  return {l, m};
}

BoundaryRestriction restrict_to_torus(const Presentation& p, const RepresentationPoint& rep) {
  const Quat qm = evaluate_word(p.meridian, rep.images);
  const Quat ql = evaluate_word(p.longitude, rep.images);
  const Quat comm_diff = ql * qm;
  const Quat comm_diff2 = qm * ql;
  const double comm = comm_diff.dist(comm_diff2);
  if (comm > 1e-8) {
    throw NonCommuting("restrict_to_torus: boundary images do not commute (|[l,m]| = " +
                       std::to_string(comm) + ")");
  }
  const Vec3 im_m = qm.imag(), im_l = ql.imag();
  const double nm = im_m.norm(), nl = im_l.norm();
  BoundaryRestriction out;
  if (nm < 1e-9 && nl < 1e-9) {
    out.point = canonicalize(ql.angle(), qm.angle());
    out.corner = true;
    return out;
  }
  const Vec3 axis = nm >= nl ? Vec3(im_m / nm) : Vec3(im_l / nl);
  const double theta_m = std::atan2(im_m.dot(axis), qm.w);
  const double theta_l = std::atan2(im_l.dot(axis), ql.w);
  out.point = canonicalize(theta_l, theta_m);
  return out;
}

double evaluate_on_pillowcase(const PeripheralFunction& f, const PillowcasePoint& pt) {
  double sum = 0.0;
  for (const auto& t : f.terms) {
    sum += t.coeff * 2.0 * std::cos(t.p * pt.theta_l + t.q * pt.theta_m);
  }
  return sum;
}

std::vector<double> a_ideal_residual(const Presentation& p,
                                     const std::vector<PeripheralFunction>& candidates,
                                     const std::vector<RepresentationPoint>& sample) {
  std::vector<double> out(candidates.size(), 0.0);
  for (const RepresentationPoint& rep : sample) {
    const BoundaryRestriction r = restrict_to_torus(p, rep);
    for (size_t i = 0; i < candidates.size(); ++i) {
      out[i] = std::max(out[i], std::abs(evaluate_on_pillowcase(candidates[i], r.point)));
    }
  }
  return out;
}

}  // namespace dubois
