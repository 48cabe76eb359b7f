#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dubois/torsion.hpp"

namespace dubois {

enum class Kernel { parametrix, heat };
enum class Sampler { haar, tube };

// Monte-Carlo estimate of the concentrated integral over SU(2)^k.
struct GlobalEstimate {
  double lambda = 0.0;
  Kernel kernel = Kernel::parametrix;
  Sampler sampler = Sampler::haar;
  std::int64_t n_samples = 0;
  double value = 0.0;
  double std_error = 0.0;
};

// Phi = (sum_i ||log eval(r_i)||^2 + t^2 / ||v||^2) / 4; undefined on S
// (a relator at -1) or T (||v|| < 1e-12). Undefinedness is in-band.
struct PhiValue {
  double value = 0.0;
  bool defined = false;
};

PhiValue phi(const Presentation& p, const std::vector<Quat>& point, double t);

// Tube chart around a stored 1-parameter family: the family itself, a smooth
// orthonormal frame of the normal space (right-translated, one Vec3 per
// generator slot), and the singular values of delta2 along the two frame
// directions. Only deficiency-one, k = 2 charts are supported.
struct TubeChart {
  double t_min = 0.0;
  double t_max = 1.0;
  std::function<std::array<Quat, 2>(double)> images;
  // frame[a] = the a-th normal direction; sigma[a] the matching singular value.
  std::function<void(double, std::array<std::array<Vec3, 2>, 2>& frame,
                     std::array<double, 2>& sigma)>
      frame;
};

// Analytic chart along the built-in trefoil family.
TubeChart builtin_trefoil_tube();

struct EstimateOptions {
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = hardware concurrency
  const TubeChart* tube = nullptr;
};

// Monte-Carlo estimate of
//   (1/pi^2) sqrt(4 pi / lambda) Int_{SU(2)^k} f ||v|| prod kernel(r_j) nu^k
// with nu^k = (2 pi^2)^k Haar^k. The limit lambda -> infinity is the
// integral of f against the torsion form on the character variety; the
// 1/pi^2 is the volume of the conjugation fiber SU(2)/{+-1}. The tube
// sampler draws (A, t) through the chart plus Gaussian offsets of variance
// 2/lambda along the normal frame (scaled per direction by the singular
// values), with exact importance weights. Throws NoPathForTubeSampler when
// no chart is provided.
GlobalEstimate global_estimate(const Presentation& p, const PeripheralFunction& f,
                               const KernelParams& params, Sampler sampler, Kernel kernel,
                               std::int64_t n, const EstimateOptions& opts = {});

struct SweepResult {
  double extrapolated = 0.0;  // the a of value(lambda) = a + b/lambda
  double extrapolated_err = 0.0;
  double slope = 0.0;  // b
  std::vector<GlobalEstimate> estimates;
};

// Weighted least-squares fit value(lambda) = a + b/lambda over >= 3 increasing
// lambdas; FitFailure when any residual exceeds 3x its MC error.
SweepResult lambda_sweep(const Presentation& p, const PeripheralFunction& f,
                         const std::vector<double>& lambdas, Sampler sampler, Kernel kernel,
                         std::int64_t n, const EstimateOptions& opts = {});

}  // namespace dubois
