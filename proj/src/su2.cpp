#include "dubois/su2.hpp"

namespace dubois {

Quat exp_map(const Vec3& v) {
  const double t = v.norm();
  if (t == 0.0) return Quat::identity();
  const double s = std::sin(t) / t;
  return {std::cos(t), s * v[0], s * v[1], s * v[2]};
}

Vec3 log_map(const Quat& g) {
  const Vec3 im = g.imag();
  const double n = im.norm();
  const double phi = std::atan2(n, g.w);
  if (kPi - phi < 1e-9) {
    throw AntipodeError("log_map: element within 1e-9 of -identity");
  }
  if (n == 0.0) return Vec3::Zero();
  return (phi / n) * im;
}

Mat3 adjoint_matrix(const Quat& g) {
  const double w = g.w, x = g.x, y = g.y, z = g.z;
  Mat3 m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return m;
}

Quat quat_pow(const Quat& g, int n) {
  if (n == 0) return Quat::identity();
  Quat base = n > 0 ? g : g.inverse();
  unsigned long long e = n > 0 ? static_cast<unsigned long long>(n)
                               : static_cast<unsigned long long>(-(long long)n);
  Quat acc = Quat::identity();
  while (e > 0) {
    if (e & 1ull) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc.normalized();
}

double chebyshev_s(int c, double x) {
  if (c <= 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int n = 2; n <= c; ++n) {
    const double next = x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double chebyshev_ratio(int c, double phi) {
  const int m = c + 1;
  // Near phi = 0 or pi, sin((c+1)phi)/sin(phi) has a removable singularity;
  // expand to second order around the nearer endpoint.
  if (phi < 1e-6) {
    return m * (1.0 - (double(m) * m - 1.0) * phi * phi / 6.0);
  }
  if (kPi - phi < 1e-6) {
    const double e = kPi - phi;
    const double sign = (c % 2 == 0) ? 1.0 : -1.0;
    return sign * m * (1.0 - (double(m) * m - 1.0) * e * e / 6.0);
  }
  return std::sin(m * phi) / std::sin(phi);
}

double gaussian_parametrix_angle(double phi, double lambda) {
  const double a = lambda / (4.0 * kPi);
  return a * std::sqrt(a) * std::exp(-lambda * phi * phi / 4.0);
}

double gaussian_parametrix(const Quat& g, const KernelParams& p) {
  return gaussian_parametrix_angle(g.angle(), p.lambda);
}

double heat_kernel_trace_angle(double phi, const KernelParams& p) {
  double sum = 0.0;
  for (int c = 0;; ++c) {
    const double damp = std::exp(-double(c) * (c + 2) / p.lambda);
    const double bound = double(c + 1) * (c + 1) * damp;
    if (bound < p.truncation_eps * std::max(1.0, std::abs(sum))) break;
    sum += double(c + 1) * damp * chebyshev_ratio(c, phi);
    if (c > 100000) break;  // unreachable for sane lambda
  }
  return sum / kSu2Volume;
}

double heat_kernel_trace(const Quat& g, const KernelParams& p) {
  return heat_kernel_trace_angle(g.angle(), p);
}

Quat haar_sample(RngStream& rng) {
  while (true) {
    const Quat q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    const double n = q.norm();
    if (n > 1e-12) return {q.w / n, q.x / n, q.y / n, q.z / n};
  }
}

}  // namespace dubois
