#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "dubois/rep.hpp"

namespace dubois {

// Relative singular-value threshold shared by all rank decisions.
inline constexpr double kRankTol = 1e-8;

// The extended adjoint chain complex at a representation point, assembled in
// the orthonormal tensor basis {e^i x (i,j,k)}.
struct ChainMaps {
  Eigen::MatrixXd delta1;  // 3k x 3, block i = Ad(X_i) - I
  Eigen::MatrixXd delta2;  // 3(k-1) x 3k, instantiated Fox Jacobian
  Eigen::VectorXd v;       // 3(k-1), blocks (Ad(rho s_j) - Ad(rho t_j)) P
};

// Throws CentralMeridian when |Im rho(mu)| < 1e-9 (P undefined).
ChainMaps build_chain_maps(const Presentation& p, const RepresentationPoint& rep);

namespace detail {
// As build_chain_maps, but a central meridian yields v = 0 plus a flag
// instead of throwing (regularity reports carry the verdict in-band).
ChainMaps assemble_chain_maps(const Presentation& p, const std::vector<Quat>& images,
                              bool* meridian_central);
}  // namespace detail

// Product of singular values above 1e-8 * sigma_max. With expected_rank set,
// throws RankMismatch when the thresholded rank differs.
double pseudo_det(const Eigen::MatrixXd& m, std::optional<int> expected_rank = {});

// The three factors of d tau(h) and their ratio.
struct TorsionBreakdown {
  double volume_det = 0.0;   // |det [delta1 | h | b1]|
  double v_norm = 0.0;       // ||v||
  double r_pseudodet = 0.0;  // ||d rbar||
  double value = 0.0;        // volume_det * v_norm / r_pseudodet
};

// `pseudo` computes ||d rbar|| from the singular values of delta2; `direct`
// evaluates the torsion determinant ratio with b1bar = delta2(b1) and
// b2 = v/||v|| appended. The two must agree at regular points.
enum class TorsionMode { pseudo, direct };

TorsionBreakdown torsion_at(const Presentation& p, const RepresentationPoint& rep,
                            const TangentCocycle& h, TorsionMode mode = TorsionMode::pseudo);

// Symmetric Laurent function sum_i c_i (l^p m^q + l^-p m^-q), canonicalized
// so p > 0 or (p = 0 and q >= 0); the (0,0) term is the constant 2c.
struct PeripheralFunction {
  struct Term {
    double coeff = 0.0;
    int p = 0;
    int q = 0;
  };
  std::vector<Term> terms;

  static PeripheralFunction make(std::vector<Term> terms);
  static PeripheralFunction constant_one() { return make({{0.5, 0, 0}}); }
};

// CLI mini-grammar "c:p:q[,c:p:q]*".
PeripheralFunction parse_peripheral_terms(const std::string& text);
std::string peripheral_to_string(const PeripheralFunction& f);

// sum_i c_i tr(rho(longitude)^p rho(meridian)^q), tr of a unit quaternion
// being twice its real part.
double evaluate_peripheral(const PeripheralFunction& f, const Presentation& p,
                           const RepresentationPoint& rep);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive Gauss-Kronrod 15-point integration of
// t -> evaluate_peripheral(f) * torsion_at(tangent_cocycle(t)).value
// over the open parameter interval of the path.
QuadratureResult integrate_path(const Presentation& p, const PathFamily& path,
                                const PeripheralFunction& f, double rel_tol = 1e-9);

// |integrate_path(...)|.
double seminorm(const Presentation& p, const PathFamily& path, const PeripheralFunction& f,
                double rel_tol = 1e-9);

}  // namespace dubois
