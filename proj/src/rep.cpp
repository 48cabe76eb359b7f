#include "dubois/rep.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "dubois/torsion.hpp"

namespace dubois {

namespace {

constexpr double kTrefoilC = 0.5;                  // cos(pi/3)
const double kTrefoilS = std::sqrt(3.0) / 2.0;     // sin(pi/3)

Eigen::VectorXd relator_logs(const Presentation& p, const std::vector<Quat>& images) {
  const int m = static_cast<int>(p.relators.size());
  Eigen::VectorXd f(3 * m);
  for (int j = 0; j < m; ++j) {
    const Vec3 w = log_map(evaluate_word(p.relators[j], images));
    f.segment<3>(3 * j) = w;
  }
  return f;
}

// Central-difference Jacobian of (X_i) -> (log eval(r_j)) in the
// right-translated charts, columns indexed (generator, axis).
Eigen::MatrixXd relator_jacobian(const Presentation& p, const std::vector<Quat>& images,
                                 double h = 1e-6) {
  const int k = p.generator_count;
  const int m = static_cast<int>(p.relators.size());
  Eigen::MatrixXd jac(3 * m, 3 * k);
  std::vector<Quat> probe = images;
  for (int i = 0; i < k; ++i) {
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 u = Vec3::Zero();
      u[axis] = h;
      probe[i] = (exp_map(u) * images[i]).normalized();
      const Eigen::VectorXd fp = relator_logs(p, probe);
      probe[i] = (exp_map(-u) * images[i]).normalized();
      const Eigen::VectorXd fm = relator_logs(p, probe);
      probe[i] = images[i];
      jac.col(3 * i + axis) = (fp - fm) / (2.0 * h);
    }
  }
  return jac;
}

bool meridian_central(const Presentation& p, const std::vector<Quat>& images, double tol) {
  return evaluate_word(p.meridian, images).imag().norm() < tol;
}

// Conjugate `images` toward `target` (gauge fixing on the conjugation orbit).
void align_by_conjugation(std::vector<Quat>& images, const std::vector<Quat>& target) {
  const int k = static_cast<int>(images.size());
  const double h = 1e-6;
  for (int iter = 0; iter < 20; ++iter) {
    Eigen::VectorXd r(4 * k);
    for (int i = 0; i < k; ++i) {
      r[4 * i + 0] = images[i].w - target[i].w;
      r[4 * i + 1] = images[i].x - target[i].x;
      r[4 * i + 2] = images[i].y - target[i].y;
      r[4 * i + 3] = images[i].z - target[i].z;
    }
    Eigen::MatrixXd jac(4 * k, 3);
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 u = Vec3::Zero();
      u[axis] = h;
      const Quat ap = exp_map(u), am = exp_map(-u);
      for (int i = 0; i < k; ++i) {
        const Quat qp = conjugate_by(ap, images[i]);
        const Quat qm = conjugate_by(am, images[i]);
        jac(4 * i + 0, axis) = (qp.w - qm.w) / (2 * h);
        jac(4 * i + 1, axis) = (qp.x - qm.x) / (2 * h);
        jac(4 * i + 2, axis) = (qp.y - qm.y) / (2 * h);
        jac(4 * i + 3, axis) = (qp.z - qm.z) / (2 * h);
      }
    }
    const Vec3 du = jac.colPivHouseholderQr().solve(-r);
    if (!du.allFinite()) break;
    const Quat a = exp_map(du);
    for (Quat& q : images) q = conjugate_by(a, q);
    if (du.norm() < 1e-13) break;
  }
}

}  // namespace

double representation_residual(const Presentation& p, const std::vector<Quat>& images) {
  double res = 0.0;
  for (const Word& r : p.relators) {
    res = std::max(res, evaluate_word(r, images).angle());
  }
  return res;
}

RepresentationPoint conjugate_representation(const RepresentationPoint& rep, const Quat& a) {
  RepresentationPoint out = rep;
  for (Quat& q : out.images) q = conjugate_by(a, q);
  return out;
}

bool correct_to_variety(const Presentation& p, std::vector<Quat>& images,
                        double target_residual, int max_iters) {
  double res = representation_residual(p, images);
  for (int it = 0; it < max_iters; ++it) {
    if (res <= target_residual) return true;
    Eigen::VectorXd f;
    try {
      f = relator_logs(p, images);
    } catch (const AntipodeError&) {
      return false;  // relator pinned at -1, hopeless start
    }
    const Eigen::MatrixXd jac = relator_jacobian(p, images);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kRankTol);
    Eigen::VectorXd delta = svd.solve(-f);
    double max_block = 0.0;
    for (int i = 0; i < p.generator_count; ++i) {
      max_block = std::max(max_block, delta.segment<3>(3 * i).norm());
    }
    if (max_block > 0.7) delta *= 0.7 / max_block;

    // Backtracking on the residual.
    double scale = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 8; ++bt) {
      std::vector<Quat> trial = images;
      for (int i = 0; i < p.generator_count; ++i) {
        trial[i] = (exp_map(Vec3(scale * delta.segment<3>(3 * i))) * images[i]).normalized();
      }
      const double trial_res = representation_residual(p, trial);
      if (trial_res < res) {
        images = std::move(trial);
        res = trial_res;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) return res <= target_residual;
  }
  return representation_residual(p, images) <= target_residual;
}

RepresentationPoint find_representation(const Presentation& p, RngStream& rng,
                                        const FindOptions& opts) {
  for (int attempt = 0; attempt < opts.max_restarts; ++attempt) {
    std::vector<Quat> images(p.generator_count);
    for (Quat& q : images) q = haar_sample(rng);
    if (!correct_to_variety(p, images, opts.target_residual, opts.max_newton_iters)) continue;
    if (opts.abelian_filter && meridian_central(p, images, opts.central_tol)) continue;
    return {images, representation_residual(p, images)};
  }
  throw NoConvergence("find_representation: restart budget exhausted");
}

RepresentationPoint builtin_trefoil_path(double t) {
  if (!(t > 0.0 && t < kPi)) {
    throw DomainError("builtin trefoil path parameter must lie in (0, pi)");
  }
  RepresentationPoint rep;
  rep.images = {Quat(0, 1, 0, 0),
                Quat(kTrefoilC, kTrefoilS * std::cos(t), kTrefoilS * std::sin(t), 0)};
  rep.residual = 0.0;
  return rep;
}

std::vector<Vec3> trefoil_tangent_components(double t) {
  const double sc = kTrefoilS * kTrefoilC;
  return {Vec3::Zero(),
          Vec3(-sc * std::sin(t), sc * std::cos(t), kTrefoilS * kTrefoilS)};
}

PathFamily builtin_trefoil_family() {
  PathFamily fam;
  fam.at = [](double t) { return builtin_trefoil_path(t); };
  fam.analytic_tangent = [](double t) { return trefoil_tangent_components(t); };
  fam.t_min = 0.0;
  fam.t_max = kPi;
  return fam;
}

TangentCocycle tangent_cocycle(const Presentation& p, const PathFamily& path, double t0) {
  const int k = p.generator_count;
  std::vector<Vec3> comp;
  if (path.analytic_tangent) {
    comp = path.analytic_tangent(t0);
  } else {
    // 5-point stencil: central difference with one Richardson level.
    const double h = 1e-5;
    const RepresentationPoint base = path.at(t0);
    const RepresentationPoint p1 = path.at(t0 + h), m1 = path.at(t0 - h);
    const RepresentationPoint p2 = path.at(t0 + 2 * h), m2 = path.at(t0 - 2 * h);
    comp.resize(k);
    for (int i = 0; i < k; ++i) {
      const auto diff4 = [&](const Quat& a, const Quat& b, double w) {
        return Quat(w * (a.w - b.w), w * (a.x - b.x), w * (a.y - b.y), w * (a.z - b.z));
      };
      const Quat d1 = diff4(p1.images[i], m1.images[i], 8.0);
      const Quat d2 = diff4(p2.images[i], m2.images[i], -1.0);
      const Quat d((d1.w + d2.w) / (12 * h), (d1.x + d2.x) / (12 * h),
                   (d1.y + d2.y) / (12 * h), (d1.z + d2.z) / (12 * h));
      comp[i] = (d * base.images[i].inverse()).imag();
    }
  }

  // Project onto ker delta2.
  const RepresentationPoint rep = path.at(t0);
  const ChainMaps cm = build_chain_maps(p, rep);
  Eigen::VectorXd h_vec(3 * k);
  for (int i = 0; i < k; ++i) h_vec.segment<3>(3 * i) = comp[i];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cm.delta2, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::VectorXd projected = h_vec;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] > kRankTol * sv[0]) {
      const Eigen::VectorXd dir = svd.matrixV().col(i);
      projected -= dir.dot(projected) * dir;
    }
  }
  const double displacement = (projected - h_vec).norm();
  if (displacement > 1e-6) {
    throw NotACocycle("tangent_cocycle: projection displacement " + std::to_string(displacement));
  }
  TangentCocycle out;
  out.components.resize(k);
  for (int i = 0; i < k; ++i) out.components[i] = projected.segment<3>(3 * i);
  return out;
}

RegularityReport regularity_check(const Presentation& p, const RepresentationPoint& rep) {
  const int k = p.generator_count;
  bool central = false;
  const ChainMaps cm = detail::assemble_chain_maps(p, rep.images, &central);
  RegularityReport report;
  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cm.delta1);
    const auto& sv = svd.singularValues();
    for (int i = 0; i < sv.size(); ++i) {
      if (sv[i] > kRankTol * sv[0]) ++report.rank_delta1;
    }
  }
  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cm.delta2);
    const auto& sv = svd.singularValues();
    for (int i = 0; i < sv.size(); ++i) {
      if (sv[i] > kRankTol * sv[0]) ++report.rank_delta2;
    }
  }
  report.v_norm = central ? 0.0 : cm.v.norm();
  report.is_regular = report.rank_delta1 == 3 && report.rank_delta2 == 3 * k - 4 &&
                      report.v_norm > kRankTol;
  return report;
}

std::vector<RepresentationPoint> continue_path(const Presentation& p,
                                               const RepresentationPoint& seed,
                                               double step, int n_steps,
                                               const ContinuationOptions& opts) {
  const int k = p.generator_count;
  std::vector<RepresentationPoint> out{seed};
  if (n_steps <= 0) return out;
  {
    const RegularityReport r = regularity_check(p, seed);
    if (!r.is_regular) throw SingularPoint("continue_path: seed is not regular");
  }

  Eigen::VectorXd prev_dir;
  if (!opts.initial_direction.empty()) {
    prev_dir.resize(3 * k);
    for (int i = 0; i < k; ++i) prev_dir.segment<3>(3 * i) = opts.initial_direction[i];
  }

  std::vector<Quat> current = seed.images;
  for (int s = 0; s < n_steps; ++s) {
    const ChainMaps cm = detail::assemble_chain_maps(p, current, nullptr);

    // H^1 direction: in ker delta2, orthogonal to im delta1.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd2(cm.delta2, Eigen::ComputeFullV);
    const auto& sv2 = svd2.singularValues();
    int rank2 = 0;
    for (int i = 0; i < sv2.size(); ++i) {
      if (sv2[i] > kRankTol * sv2[0]) ++rank2;
    }
    if (rank2 != 3 * k - 4) throw SingularPoint("continue_path: delta2 rank dropped");
    const Eigen::MatrixXd kernel = svd2.matrixV().rightCols(3 * k - rank2);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(cm.delta1);
    const Eigen::MatrixXd q1 = qr.householderQ() * Eigen::MatrixXd::Identity(3 * k, 3);
    const Eigen::MatrixXd overlap = q1.transpose() * kernel;  // 3 x dim(ker)
    Eigen::JacobiSVD<Eigen::MatrixXd> svd_o(overlap, Eigen::ComputeFullV);
    const Eigen::VectorXd coeffs = svd_o.matrixV().col(overlap.cols() - 1);
    Eigen::VectorXd h = kernel * coeffs;
    h.normalize();
    if (prev_dir.size() > 0 && h.dot(prev_dir) < 0) h = -h;

    // Predict, correct, gauge fix.
    std::vector<Quat> next(k);
    for (int i = 0; i < k; ++i) {
      next[i] = (exp_map(Vec3(step * h.segment<3>(3 * i))) * current[i]).normalized();
    }
    if (!correct_to_variety(p, next, opts.corrector_residual, opts.max_corrector_iters)) {
      throw SingularPoint("continue_path: corrector failed to converge");
    }
    align_by_conjugation(next, current);

    RepresentationPoint point{next, representation_residual(p, next)};
    const RegularityReport report = regularity_check(p, point);
    if (!report.is_regular || report.v_norm < opts.singular_vnorm) {
      throw SingularPoint("continue_path: regularity lost (||v|| = " +
                          std::to_string(report.v_norm) + ")");
    }
    out.push_back(point);
    prev_dir = h;
    current = std::move(next);
  }
  return out;
}

}  // namespace dubois
