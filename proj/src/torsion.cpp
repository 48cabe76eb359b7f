#include "dubois/torsion.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cstdio>
#include <map>

namespace dubois {

namespace detail {

ChainMaps assemble_chain_maps(const Presentation& p, const std::vector<Quat>& images,
                              bool* meridian_central) {
  const int k = p.generator_count;
  const int m = static_cast<int>(p.relators.size());
  ChainMaps cm;
  cm.delta1.resize(3 * k, 3);
  for (int i = 0; i < k; ++i) {
    cm.delta1.block<3, 3>(3 * i, 0) = adjoint_matrix(images[i]) - Mat3::Identity();
  }
  cm.delta2.resize(3 * m, 3 * k);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < k; ++i) {
      cm.delta2.block<3, 3>(3 * j, 3 * i) =
          instantiate_fox(fox_derivative(p.relators[j], i), images);
    }
  }
  cm.v.setZero(3 * m);
  const Vec3 im = evaluate_word(p.meridian, images).imag();
  const bool central = im.norm() < 1e-9;
  if (meridian_central) *meridian_central = central;
  if (!central) {
    const Vec3 axis = im.normalized();
    for (int j = 0; j < m; ++j) {
      const Mat3 ads = adjoint_matrix(evaluate_word(p.peripheral[j].s, images));
      const Mat3 adt = adjoint_matrix(evaluate_word(p.peripheral[j].t, images));
      cm.v.segment<3>(3 * j) = (ads - adt) * axis;
    }
  }
  return cm;
}

}  // namespace detail

ChainMaps build_chain_maps(const Presentation& p, const RepresentationPoint& rep) {
  bool central = false;
  ChainMaps cm = detail::assemble_chain_maps(p, rep.images, &central);
  if (central) {
    throw CentralMeridian("build_chain_maps: meridian image is central, P undefined");
  }
  return cm;
}

double pseudo_det(const Eigen::MatrixXd& m, std::optional<int> expected_rank) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? kRankTol * sv[0] : 0.0;
  double det = 1.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff) {
      det *= sv[i];
      ++rank;
    }
  }
  if (expected_rank && rank != *expected_rank) {
    throw RankMismatch("pseudo_det: rank " + std::to_string(rank) + ", expected " +
                       std::to_string(*expected_rank));
  }
  return det;
}

namespace {

// Core of torsion_at once the chain maps and the SVD of delta2 are in hand.
TorsionBreakdown torsion_from_decomposition(const ChainMaps& cm,
                                            const Eigen::JacobiSVD<Eigen::MatrixXd>& svd2,
                                            const Eigen::VectorXd& h_vec, TorsionMode mode,
                                            int k) {
  TorsionBreakdown out;
  out.v_norm = cm.v.norm();
  if (out.v_norm <= kRankTol) throw NotRegular("torsion_at: ||v|| vanishes");

  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd1(cm.delta1);
    const auto& sv = svd1.singularValues();
    int rank1 = 0;
    for (int i = 0; i < sv.size(); ++i) {
      if (sv[i] > kRankTol * sv[0]) ++rank1;
    }
    if (rank1 != 3) throw NotRegular("torsion_at: rank(delta1) = " + std::to_string(rank1));
  }

  const auto& sv2 = svd2.singularValues();
  int rank2 = 0;
  for (int i = 0; i < sv2.size(); ++i) {
    if (sv2[i] > kRankTol * sv2[0]) ++rank2;
  }
  if (rank2 != 3 * k - 4) {
    throw RankMismatch("torsion_at: rank(delta2) = " + std::to_string(rank2) + ", expected " +
                       std::to_string(3 * k - 4));
  }

  if ((cm.delta2 * h_vec).norm() > 1e-6 * std::max(1e-12, h_vec.norm())) {
    throw NotACocycle("torsion_at: h is not in ker(delta2)");
  }

  // b1 spans the orthogonal complement of ker delta2.
  const Eigen::MatrixXd b1 = svd2.matrixV().leftCols(rank2);
  Eigen::MatrixXd big(3 * k, 3 * k);
  big.leftCols(3) = cm.delta1;
  big.col(3) = h_vec;
  big.rightCols(rank2) = b1;
  out.volume_det = std::abs(big.determinant());

  if (mode == TorsionMode::pseudo) {
    double det = 1.0;
    for (int i = 0; i < rank2; ++i) det *= sv2[i];
    out.r_pseudodet = det;
  } else {
    Eigen::MatrixXd little(3 * (k - 1), rank2 + 1);
    little.leftCols(rank2) = cm.delta2 * b1;
    little.col(rank2) = cm.v / out.v_norm;
    out.r_pseudodet = std::abs(little.determinant());
  }
  out.value = out.volume_det * out.v_norm / out.r_pseudodet;
  return out;
}

}  // namespace

TorsionBreakdown torsion_at(const Presentation& p, const RepresentationPoint& rep,
                            const TangentCocycle& h, TorsionMode mode) {
  const int k = p.generator_count;
  ChainMaps cm;
  try {
    cm = build_chain_maps(p, rep);
  } catch (const CentralMeridian&) {
    throw NotRegular("torsion_at: meridian image is central");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd2(cm.delta2, Eigen::ComputeFullV);
  Eigen::VectorXd h_vec(3 * k);
  for (int i = 0; i < k; ++i) h_vec.segment<3>(3 * i) = h.components[i];
  return torsion_from_decomposition(cm, svd2, h_vec, mode, k);
}

PeripheralFunction PeripheralFunction::make(std::vector<Term> terms) {
  std::map<std::pair<int, int>, double> acc;
  for (Term t : terms) {
    if (t.p < 0 || (t.p == 0 && t.q < 0)) {
      t.p = -t.p;
      t.q = -t.q;
    }
    acc[{t.p, t.q}] += t.coeff;
  }
  PeripheralFunction f;
  for (const auto& [pq, c] : acc) {
    if (c != 0.0) f.terms.push_back({c, pq.first, pq.second});
  }
  return f;
}

PeripheralFunction parse_peripheral_terms(const std::string& text) {
  std::vector<PeripheralFunction::Term> terms;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    const size_t c1 = item.find(':');
    const size_t c2 = c1 == std::string::npos ? std::string::npos : item.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw SchemaError("peripheral term \"" + item + "\" is not of the form c:p:q");
    }
    try {
      size_t used = 0;
      PeripheralFunction::Term t;
      t.coeff = std::stod(item.substr(0, c1), &used);
      if (used != c1) throw std::invalid_argument("trailing");
      t.p = std::stoi(item.substr(c1 + 1, c2 - c1 - 1), &used);
      if (used != c2 - c1 - 1) throw std::invalid_argument("trailing");
      t.q = std::stoi(item.substr(c2 + 1), &used);
      if (used != item.size() - c2 - 1) throw std::invalid_argument("trailing");
      terms.push_back(t);
    } catch (const std::exception&) {
      throw SchemaError("cannot parse peripheral term \"" + item + "\"");
    }
    if (comma == text.size()) break;
    pos = comma + 1;
  }
  if (terms.empty()) throw SchemaError("empty peripheral function");
  return PeripheralFunction::make(std::move(terms));
}

std::string peripheral_to_string(const PeripheralFunction& f) {
  std::string s;
  for (const auto& t : f.terms) {
    if (!s.empty()) s.push_back(',');
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g:%d:%d", t.coeff, t.p, t.q);
    s += buf;
  }
  return s;
}

double evaluate_peripheral(const PeripheralFunction& f, const Presentation& p,
                           const RepresentationPoint& rep) {
  const Quat l = evaluate_word(p.longitude, rep.images);
  const Quat m = evaluate_word(p.meridian, rep.images);
  double sum = 0.0;
  for (const auto& t : f.terms) {
    sum += t.coeff * (quat_pow(l, t.p) * quat_pow(m, t.q)).trace();
  }
  return sum;
}

QuadratureResult integrate_path(const Presentation& p, const PathFamily& path,
                                const PeripheralFunction& f, double rel_tol) {
  const int k = p.generator_count;
  // Same computation as evaluate_peripheral * torsion_at(tangent_cocycle),
  // sharing one chain-map assembly and one SVD per evaluation point.
  const auto integrand = [&](double t) {
    const RepresentationPoint rep = path.at(t);
    const ChainMaps cm = build_chain_maps(p, rep);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd2(cm.delta2, Eigen::ComputeFullV);

    std::vector<Vec3> comp;
    if (path.analytic_tangent) {
      comp = path.analytic_tangent(t);
    } else {
      const TangentCocycle stencil = tangent_cocycle(p, path, t);
      comp = stencil.components;
    }
    Eigen::VectorXd h_vec(3 * k);
    for (int i = 0; i < k; ++i) h_vec.segment<3>(3 * i) = comp[i];
    const auto& sv = svd2.singularValues();
    for (int i = 0; i < sv.size(); ++i) {
      if (sv[i] > kRankTol * sv[0]) {
        const Eigen::VectorXd dir = svd2.matrixV().col(i);
        h_vec -= dir.dot(h_vec) * dir;
      }
    }
    const TorsionBreakdown tb =
        torsion_from_decomposition(cm, svd2, h_vec, TorsionMode::pseudo, k);
    return evaluate_peripheral(f, p, rep) * tb.value;
  };
  // Fixed uniform panels, adaptive Gauss-Kronrod 15 inside each, summation
  // in panel order. The pre-split keeps oscillatory integrands that cancel
  // to zero from recursing to full depth chasing relative accuracy.
  constexpr int kPanels = 32;
  QuadratureResult out;
  double l1 = 0.0;
  const double width = (path.t_max - path.t_min) / kPanels;
  for (int i = 0; i < kPanels; ++i) {
    double err = 0.0, panel_l1 = 0.0;
    out.value += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        integrand, path.t_min + i * width, path.t_min + (i + 1) * width, 5, rel_tol, &err,
        &panel_l1);
    out.error += err;
    l1 += panel_l1;
  }
  if (!std::isfinite(out.value) || out.error > 1e-6 * std::max(1.0, l1)) {
    throw QuadratureFailure("integrate_path: error estimate " + std::to_string(out.error));
  }
  return out;
}

double seminorm(const Presentation& p, const PathFamily& path, const PeripheralFunction& f,
                double rel_tol) {
  return std::abs(integrate_path(p, path, f, rel_tol).value);
}

}  // namespace dubois
