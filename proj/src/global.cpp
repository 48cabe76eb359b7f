#include "dubois/global.hpp"

#include <cmath>
#include <thread>

namespace dubois {

namespace {

struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

struct McResult {
  double mean = 0.0;
  double std_error = 0.0;
};

// Fixed partition of the index range across workers, per-index RNG streams,
// reduction in worker order: bit-reproducible for a fixed (seed, workers).
template <class SampleFn>
McResult run_mc(std::int64_t n, int workers, const SampleFn& sample) {
  if (workers <= 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
  }
  workers = static_cast<int>(std::min<std::int64_t>(workers, n));
  std::vector<KahanSum> sums(workers), squares(workers);
  std::vector<std::thread> pool;
  const std::int64_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      const std::int64_t lo = w * chunk;
      const std::int64_t hi = std::min<std::int64_t>(n, lo + chunk);
      for (std::int64_t i = lo; i < hi; ++i) {
        const double x = sample(i);
        sums[w].add(x);
        squares[w].add(x * x);
      }
    });
  }
  for (auto& th : pool) th.join();
  KahanSum total, total2;
  for (int w = 0; w < workers; ++w) {
    total.add(sums[w].s);
    total2.add(squares[w].s);
  }
  McResult out;
  out.mean = total.s / double(n);
  const double var = std::max(0.0, (total2.s - double(n) * out.mean * out.mean) / double(n - 1));
  out.std_error = std::sqrt(var / double(n));
  return out;
}

double peripheral_value(const PeripheralFunction& f, const Quat& l, const Quat& m) {
  double sum = 0.0;
  for (const auto& t : f.terms) {
    sum += t.coeff * (quat_pow(l, t.p) * quat_pow(m, t.q)).trace();
  }
  return sum;
}

// f * ||v|| * prod_j kernel(r_j) at an arbitrary tuple; S and T contribute 0.
double su2k_integrand(const Presentation& p, const PeripheralFunction& f,
                      const KernelParams& params, Kernel kernel,
                      const std::vector<Quat>& images) {
  double prod = 1.0;
  for (const Word& r : p.relators) {
    const double phi = evaluate_word(r, images).angle();
    prod *= kernel == Kernel::parametrix ? gaussian_parametrix_angle(phi, params.lambda)
                                         : heat_kernel_trace_angle(phi, params);
  }
  const Quat mu = evaluate_word(p.meridian, images);
  const Vec3 im = mu.imag();
  const double imn = im.norm();
  if (imn < 1e-12) return 0.0;
  const Vec3 axis = im / imn;
  double vn2 = 0.0;
  for (const auto& per : p.peripheral) {
    const Mat3 ads = adjoint_matrix(evaluate_word(per.s, images));
    const Mat3 adt = adjoint_matrix(evaluate_word(per.t, images));
    vn2 += ((ads - adt) * axis).squaredNorm();
  }
  if (vn2 == 0.0) return 0.0;
  const Quat lam = evaluate_word(p.longitude, images);
  return peripheral_value(f, lam, mu) * std::sqrt(vn2) * prod;
}

double tube_sample_value(const Presentation& p, const PeripheralFunction& f,
                         const KernelParams& params, Kernel kernel, const TubeChart& chart,
                         RngStream& rng) {
  const double span = chart.t_max - chart.t_min;
  const Quat conj = haar_sample(rng);
  // Strictly interior t (the frame degenerates at the endpoints).
  const double u01 = (static_cast<double>(rng.next_u64() >> 11) + 0.5) * 0x1.0p-53;
  const double t = chart.t_min + span * u01;

  std::array<std::array<Vec3, 2>, 2> frame;
  std::array<double, 2> sigma;
  chart.frame(t, frame, sigma);
  // Offsets of variance 2/lambda as seen through the relator map (scaled by
  // the singular value), capped where the quadratic model stops meaning
  // anything. A defensive wide component keeps the importance weights
  // bounded where the normal curvature flattens (near the path endpoints).
  std::array<double, 2> nstd, wstd;
  std::array<double, 2> nval;
  constexpr double kNarrowWeight = 0.9;
  for (int a = 0; a < 2; ++a) {
    const double s = std::max(sigma[a], 1e-12);
    nstd[a] = std::min(1.0, std::sqrt(2.0 / params.lambda) / s);
    // Wide enough to dominate curvature-fattened tails; both components stay
    // well below the 2 pi wrap radius, where offsets re-enter the kernel
    // bump and the chart would overcount foreign sheets.
    wstd[a] = std::min(1.2, 4.0 * nstd[a]);
    const double comp = rng.uniform() < kNarrowWeight ? nstd[a] : wstd[a];
    nval[a] = rng.normal() * comp;
  }

  const auto offset_point = [&](double tt, double n0, double n1) {
    std::array<std::array<Vec3, 2>, 2> fr;
    std::array<double, 2> sg;
    chart.frame(tt, fr, sg);
    const std::array<Quat, 2> base = chart.images(tt);
    std::array<Quat, 2> out;
    for (int i = 0; i < 2; ++i) {
      out[i] = (exp_map(n0 * fr[0][i] + n1 * fr[1][i]) * base[i]).normalized();
    }
    return out;
  };
  const std::array<Quat, 2> q0 = offset_point(t, nval[0], nval[1]);

  // Jacobian of the chart (A, t, n) -> SU(2)^2 in right-translated
  // orthonormal frames; independent of A by equivariance.
  Eigen::Matrix<double, 6, 6> jac;
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 u = Vec3::Zero();
    u[axis] = 1.0;
    for (int i = 0; i < 2; ++i) {
      jac.block<3, 1>(3 * i, axis) = u - adjoint_matrix(q0[i]) * u;
    }
  }
  const double hfd = 1e-5;
  const auto fd_col = [&](const std::array<Quat, 2>& plus, const std::array<Quat, 2>& minus,
                          int col) {
    for (int i = 0; i < 2; ++i) {
      const Vec3 dp = log_map((plus[i] * q0[i].inverse()).normalized());
      const Vec3 dm = log_map((minus[i] * q0[i].inverse()).normalized());
      jac.block<3, 1>(3 * i, col) = (dp - dm) / (2 * hfd);
    }
  };
  fd_col(offset_point(t + hfd, nval[0], nval[1]), offset_point(t - hfd, nval[0], nval[1]), 3);
  fd_col(offset_point(t, nval[0] + hfd, nval[1]), offset_point(t, nval[0] - hfd, nval[1]), 4);
  fd_col(offset_point(t, nval[0], nval[1] + hfd), offset_point(t, nval[0], nval[1] - hfd), 5);
  const double jdet = std::abs(jac.determinant());

  const std::vector<Quat> images{conjugate_by(conj, q0[0]), conjugate_by(conj, q0[1])};
  const double g = su2k_integrand(p, f, params, kernel, images);
  if (g == 0.0) return 0.0;

  const double pt = 1.0 / span;
  const auto gauss = [](double x, double s) {
    return std::exp(-0.5 * x * x / (s * s)) / (s * std::sqrt(2.0 * kPi));
  };
  double pn = 1.0;
  for (int a = 0; a < 2; ++a) {
    pn *= kNarrowWeight * gauss(nval[a], nstd[a]) +
          (1.0 - kNarrowWeight) * gauss(nval[a], wstd[a]);
  }
  const double w = g * jdet / (pt * pn);
  return std::isfinite(w) ? w : 0.0;
}

}  // namespace

PhiValue phi(const Presentation& p, const std::vector<Quat>& point, double t) {
  PhiValue out;
  double sum = 0.0;
  for (const Word& r : p.relators) {
    const Quat g = evaluate_word(r, point);
    if (kPi - g.angle() < 1e-9) return out;  // in S
    sum += log_map(g).squaredNorm();
  }
  const Vec3 im = evaluate_word(p.meridian, point).imag();
  const double imn = im.norm();
  if (imn < 1e-12) return out;  // in T
  const Vec3 axis = im / imn;
  double vn2 = 0.0;
  for (const auto& per : p.peripheral) {
    const Mat3 ads = adjoint_matrix(evaluate_word(per.s, point));
    const Mat3 adt = adjoint_matrix(evaluate_word(per.t, point));
    vn2 += ((ads - adt) * axis).squaredNorm();
  }
  if (vn2 < 1e-24) return out;  // in T
  out.value = (sum + t * t / vn2) / 4.0;
  out.defined = true;
  return out;
}

TubeChart builtin_trefoil_tube() {
  const double s = std::sqrt(3.0) / 2.0;
  TubeChart chart;
  chart.t_min = 0.0;
  chart.t_max = kPi;
  chart.images = [s](double t) {
    return std::array<Quat, 2>{Quat(0, 1, 0, 0),
                               Quat(0.5, s * std::cos(t), s * std::sin(t), 0)};
  };
  // Normal frame = right singular directions of delta2 along the path. In
  // the basis {e^1 x i, e^2 x u_t} the Gram of the delta2 images is
  // [[4, -6 cos t], [-6 cos t, 9]] (the second Fox block carries a minus
  // sign); chi below diagonalizes it smoothly in t.
  chart.frame = [](double t, std::array<std::array<Vec3, 2>, 2>& frame,
                   std::array<double, 2>& sigma) {
    const double ct = std::cos(t), st = std::sin(t);
    const Vec3 a1(1, 0, 0);
    const Vec3 u(ct, st, 0);
    const double chi = 0.5 * (kPi - std::atan(12.0 * ct / 5.0));
    const double cc = std::cos(chi), sc = std::sin(chi);
    frame[0] = {cc * a1, -sc * u};
    frame[1] = {sc * a1, cc * u};
    const double disc = std::sqrt(6.25 + 36.0 * ct * ct);
    sigma[0] = std::sqrt(6.5 + disc);
    sigma[1] = std::sqrt(std::max(0.0, 6.5 - disc));
  };
  return chart;
}

GlobalEstimate global_estimate(const Presentation& p, const PeripheralFunction& f,
                               const KernelParams& params, Sampler sampler, Kernel kernel,
                               std::int64_t n, const EstimateOptions& opts) {
  if (n < 1000) throw SchemaError("global_estimate: need n >= 1000 samples");
  if (!(params.lambda > 0.0)) throw SchemaError("global_estimate: lambda must be positive");
  if (!(params.truncation_eps > 0.0 && params.truncation_eps < 1.0)) {
    throw SchemaError("global_estimate: truncation_eps must lie in (0, 1)");
  }
  const int k = p.generator_count;
  // sqrt(4 pi / lambda) integrates out the auxiliary Gaussian in t; 1/pi^2
  // converts the representation-variety integral to the character-variety
  // one (the conjugation fiber is SU(2)/{+-1}, volume pi^2). This is the
  // normalization under which the trefoil run reproduces the closed-form
  // total torsion; see README for the constant's derivation.
  const double prefactor = std::sqrt(4.0 * kPi / params.lambda) / (kPi * kPi);

  McResult mc;
  double scale = prefactor;
  if (sampler == Sampler::haar) {
    scale *= std::pow(kSu2Volume, k);
    mc = run_mc(n, opts.workers, [&](std::int64_t i) {
      RngStream rng = RngStream::for_index(opts.seed, static_cast<std::uint64_t>(i));
      std::vector<Quat> images(k);
      for (Quat& q : images) q = haar_sample(rng);
      return su2k_integrand(p, f, params, kernel, images);
    });
  } else {
    if (opts.tube == nullptr) {
      throw NoPathForTubeSampler("tube sampling requested without a stored path");
    }
    if (k != 2) {
      throw NoPathForTubeSampler("tube charts are only available for k = 2 families");
    }
    // Multiplicity 2: the conjugation parametrization covers each point twice.
    scale *= kSu2Volume / 2.0;
    const TubeChart& chart = *opts.tube;
    mc = run_mc(n, opts.workers, [&](std::int64_t i) {
      RngStream rng = RngStream::for_index(opts.seed, static_cast<std::uint64_t>(i));
      return tube_sample_value(p, f, params, kernel, chart, rng);
    });
  }

  GlobalEstimate est;
  est.lambda = params.lambda;
  est.kernel = kernel;
  est.sampler = sampler;
  est.n_samples = n;
  est.value = scale * mc.mean;
  est.std_error = scale * mc.std_error;
  return est;
}

SweepResult lambda_sweep(const Presentation& p, const PeripheralFunction& f,
                         const std::vector<double>& lambdas, Sampler sampler, Kernel kernel,
                         std::int64_t n, const EstimateOptions& opts) {
  if (lambdas.size() < 3) throw SchemaError("lambda_sweep: need at least 3 lambda values");
  for (size_t i = 1; i < lambdas.size(); ++i) {
    if (lambdas[i] <= lambdas[i - 1]) {
      throw SchemaError("lambda_sweep: lambda values must be increasing");
    }
  }
  SweepResult out;
  for (size_t i = 0; i < lambdas.size(); ++i) {
    KernelParams params;
    params.lambda = lambdas[i];
    EstimateOptions sub = opts;
    sub.seed = opts.seed + 7919 * (i + 1);
    out.estimates.push_back(global_estimate(p, f, params, sampler, kernel, n, sub));
  }

  // Weighted least squares for value(lambda) = a + b/lambda.
  double s0 = 0, s1 = 0, s2 = 0, sy = 0, sxy = 0;
  for (const auto& e : out.estimates) {
    const double sig = std::max(e.std_error, 1e-300);
    const double w = 1.0 / (sig * sig);
    const double x = 1.0 / e.lambda;
    s0 += w;
    s1 += w * x;
    s2 += w * x * x;
    sy += w * e.value;
    sxy += w * e.value * x;
  }
  const double det = s0 * s2 - s1 * s1;
  if (det <= 0) throw FitFailure("lambda_sweep: degenerate design matrix");
  out.extrapolated = (sy * s2 - sxy * s1) / det;
  out.slope = (s0 * sxy - s1 * sy) / det;
  out.extrapolated_err = std::sqrt(s2 / det);
  for (const auto& e : out.estimates) {
    const double resid = e.value - out.extrapolated - out.slope / e.lambda;
    if (std::abs(resid) > 3.0 * std::max(e.std_error, 1e-300)) {
      throw FitFailure("lambda_sweep: residual " + std::to_string(resid) + " at lambda " +
                       std::to_string(e.lambda) + " exceeds 3x MC error");
    }
  }
  return out;
}

}  // namespace dubois
