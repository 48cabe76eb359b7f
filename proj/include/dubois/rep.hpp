#pragma once

#include <functional>
#include <vector>

#include "dubois/words.hpp"

namespace dubois {

// k-tuple of SU(2) images satisfying all relators within tolerance.
struct RepresentationPoint {
  std::vector<Quat> images;
  double residual = 0.0;  // max over relators of angle(eval(r_j))
};

// Stacked e^i x (d rho_t(x_i)/dt) rho(x_i)^-1; lies in ker delta2.
struct TangentCocycle {
  std::vector<Vec3> components;

  double norm() const {
    double s = 0.0;
    for (const Vec3& c : components) s += c.squaredNorm();
    return std::sqrt(s);
  }
};

struct RegularityReport {
  int rank_delta1 = 0;
  int rank_delta2 = 0;
  double v_norm = 0.0;
  bool is_regular = false;
};

// Max over relators of the angle of the evaluated relator.
double representation_residual(const Presentation& p, const std::vector<Quat>& images);

RepresentationPoint conjugate_representation(const RepresentationPoint& rep, const Quat& a);

struct FindOptions {
  int max_restarts = 200;
  int max_newton_iters = 80;
  double target_residual = 1e-12;
  bool abelian_filter = true;
  double central_tol = 1e-6;  // |Im rho(mu)| below this counts as central
};

// Least-squares Newton on (X_1..X_k) -> (log eval(r_j))_j from Haar starts.
// Throws NoConvergence after the restart budget.
RepresentationPoint find_representation(const Presentation& p, RngStream& rng,
                                        const FindOptions& opts = {});

// Newton correction of a nearby tuple onto the representation variety.
// Returns true on success and overwrites `images`.
bool correct_to_variety(const Presentation& p, std::vector<Quat>& images,
                        double target_residual, int max_iters);

// The closed-form irreducible family of the built-in trefoil:
// rho_t = (i, cos(pi/3) + sin(pi/3)(cos t i + sin t j)), t in (0, pi).
RepresentationPoint builtin_trefoil_path(double t);

// A 1-parameter family of representations over (t_min, t_max); `at` must be
// evaluable at arbitrary interior parameters. `analytic_tangent`, when set,
// returns the exact right-translated derivative components.
struct PathFamily {
  std::function<RepresentationPoint(double)> at;
  std::function<std::vector<Vec3>(double)> analytic_tangent;  // optional
  double t_min = 0.0;
  double t_max = 1.0;
};

PathFamily builtin_trefoil_family();

// Exact tangent of the built-in family (components of the cocycle).
std::vector<Vec3> trefoil_tangent_components(double t);

// Tangent cocycle of a path at t0: analytic derivative when available,
// otherwise a 5-point stencil (central difference + one Richardson level,
// step 1e-5), projected onto ker delta2. Throws NotACocycle when the
// projection moves the vector by more than 1e-6.
TangentCocycle tangent_cocycle(const Presentation& p, const PathFamily& path, double t0);

struct ContinuationOptions {
  double corrector_residual = 1e-12;
  int max_corrector_iters = 60;
  // Continuation aborts with SingularPoint when ||v|| drops below this
  // (bifurcation approach); rank drops abort as well.
  double singular_vnorm = 0.05;
  // Optional orientation hint for the first predictor step.
  std::vector<Vec3> initial_direction;
};

// Predictor along the H^1 direction (ker delta2 orthogonal to im delta1),
// least-squares Newton corrector, conjugation gauge fixing. The returned
// list starts with the seed.
std::vector<RepresentationPoint> continue_path(const Presentation& p,
                                               const RepresentationPoint& seed,
                                               double step, int n_steps,
                                               const ContinuationOptions& opts = {});

// Ranks of delta1/delta2 by SVD (relative threshold 1e-8) and ||v||.
RegularityReport regularity_check(const Presentation& p, const RepresentationPoint& rep);

}  // namespace dubois
