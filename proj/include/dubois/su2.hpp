#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "dubois/errors.hpp"
#include "dubois/rng.hpp"

namespace dubois {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
// Riemannian volume of the unit 3-sphere; converts Haar expectation to the
// volume form inherited from R^4.
inline constexpr double kSu2Volume = 2.0 * kPi * kPi;

// Unit quaternion representing an element of SU(2). Kept normalized to 1e-12;
// products renormalize lazily (see WordChain in words.cpp) or explicitly.
struct Quat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  Quat() = default;
  Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}
  Quat(double w_, const Vec3& im) : w(w_), x(im[0]), y(im[1]), z(im[2]) {}

  static Quat identity() { return {1.0, 0.0, 0.0, 0.0}; }

  Vec3 imag() const { return {x, y, z}; }
  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

  Quat conjugate() const { return {w, -x, -y, -z}; }
  // Inverse of a unit quaternion.
  Quat inverse() const { return conjugate(); }

  Quat normalized() const {
    const double n = norm();
    return {w / n, x / n, y / n, z / n};
  }

  Quat operator*(const Quat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
  }

  Quat operator-() const { return {-w, -x, -y, -z}; }

  // Angle with the identity in [0, pi]; atan2 form, never acos.
  double angle() const { return std::atan2(imag().norm(), w); }

  // Trace in the defining 2x2 representation.
  double trace() const { return 2.0 * w; }

  double dist(const Quat& o) const {
    const double dw = w - o.w, dx = x - o.x, dy = y - o.y, dz = z - o.z;
    return std::sqrt(dw * dw + dx * dx + dy * dy + dz * dz);
  }
};

// Heat-kernel concentration parameter and series cutoff.
struct KernelParams {
  double lambda = 400.0;
  double truncation_eps = 1e-12;
};

// exp : su(2) = R^3 -> SU(2), w -> cos|w| + sin|w| w/|w|.
Quat exp_map(const Vec3& v);

// Inverse chart on S^3 minus the antipode; |log g| = angle(g) in [0, pi).
// Throws AntipodeError within angular tolerance 1e-9 of -1.
Vec3 log_map(const Quat& g);

// Matrix of v -> g v g^-1 on su(2); rotation by twice the angle of g.
Mat3 adjoint_matrix(const Quat& g);

// Integer power by repeated squaring (handles negative exponents).
Quat quat_pow(const Quat& g, int n);

// Conjugate a by g: g a g^-1.
inline Quat conjugate_by(const Quat& g, const Quat& a) {
  return (g * a * g.inverse()).normalized();
}

// s_0 = 1, s_1 = x, s_n = x s_{n-1} - s_{n-2}.
double chebyshev_s(int c, double x);

// sin((c+1)phi)/sin(phi) with the removable singularities at phi in {0, pi}
// evaluated by series. Equals (-1)^c s_c(-2 cos phi).
double chebyshev_ratio(int c, double phi);

// Gaussian parametrix (lambda/4pi)^{3/2} exp(-lambda phi^2 / 4).
double gaussian_parametrix(const Quat& g, const KernelParams& p);
double gaussian_parametrix_angle(double phi, double lambda);

// Heat-kernel trace on S^3: (1/2pi^2) sum_c (c+1) e^{-c(c+2)/lambda}
// sin((c+1)phi)/sin(phi), truncated once (c+1)^2 e^{-c(c+2)/lambda} drops
// below truncation_eps relative to the running partial sum.
double heat_kernel_trace(const Quat& g, const KernelParams& p);
double heat_kernel_trace_angle(double phi, const KernelParams& p);

// Uniform on S^3 (normalized 4-dim Gaussian); deterministic per stream.
Quat haar_sample(RngStream& rng);

}  // namespace dubois
