#include "rhsbf/rhs_operator.hpp"

#include <algorithm>
#include <cmath>

#include "rhsbf/errors.hpp"

namespace rhsbf {

void FeedConfig::validate() const {
  if (!(effective_index >= 1.0)) throw InvalidArgument("feed: n_eff must be >= 1");
}

CMat build_feed_matrix(const ArrayGeometry& geometry, const FeedConfig& feed, double frequency,
                       const MediumParams& medium) {
  feed.validate();
  const double ks = feed.effective_index * wavenumber(frequency, medium);
  const auto& elems = geometry.element_positions();
  const auto& feeders = geometry.feeder_positions();
  CMat f(geometry.num_elements(), geometry.num_feeders());
  for (std::size_t l = 0; l < feeders.size(); ++l) {
    for (std::size_t n = 0; n < elems.size(); ++n) {
      const double path = (elems[n] - feeders[l]).norm();
      f(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l)) = std::exp(-kJ * (ks * path));
    }
  }
  return f;
}

RMat uniform_hdma_weights(int num_users, int num_feeders) {
  if (num_users < 1 || num_feeders < 1) {
    throw InvalidArgument("uniform_hdma_weights: K and L must be >= 1");
  }
  return RMat::Constant(num_users, num_feeders, 1.0 / (num_users * num_feeders));
}

HologramState init_hologram_hdma(const ArrayGeometry& geometry,
                                 const std::vector<UserLocation>& users, const FeedConfig& feed,
                                 double reference_frequency, const RMat& weights,
                                 const MediumParams& medium) {
  feed.validate();
  const int num_users = static_cast<int>(users.size());
  const int num_feeders = geometry.num_feeders();
  if (weights.rows() != num_users || weights.cols() != num_feeders) {
    throw InvalidArgument("init_hologram_hdma: weights must be K x L");
  }
  if ((weights.array() < 0.0).any() || !weights.allFinite()) {
    throw InvalidArgument("init_hologram_hdma: weights must be nonnegative");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-12) {
    throw InvalidArgument("init_hologram_hdma: weights must sum to one");
  }

  const double k = wavenumber(reference_frequency, medium);
  const double ks = feed.effective_index * k;
  const auto& elems = geometry.element_positions();
  const auto& feeders = geometry.feeder_positions();

  HologramState state;
  state.weights = weights;
  state.m = RVec::Zero(geometry.num_elements());
  for (int u = 0; u < num_users; ++u) {
    const double th = users[static_cast<std::size_t>(u)].theta;
    const Vec3 k_f = k * Vec3(std::cos(th), std::sin(th), 0.0);
    for (int l = 0; l < num_feeders; ++l) {
      const double a = weights(u, l);
      if (a == 0.0) continue;
      for (std::size_t n = 0; n < elems.size(); ++n) {
        const double ref_phase = ks * (elems[n] - feeders[static_cast<std::size_t>(l)]).norm();
        const double obj_phase = k_f.dot(elems[n]);
        state.m(static_cast<Eigen::Index>(n)) += a * (std::cos(ref_phase - obj_phase) + 1.0) / 2.0;
      }
    }
  }
  // Rounding can leave values a few ulps outside the box.
  state.m = state.m.cwiseMax(0.0).cwiseMin(1.0);
  return state;
}

double spectral_radius_estimate(const CMat& a) {
  if (a.rows() == 0) return 0.0;
  const double bound = std::min(a.cwiseAbs().colwise().sum().maxCoeff(),
                                a.cwiseAbs().rowwise().sum().maxCoeff());
  if (bound <= kCertifiedBound) return bound;
  const Eigen::ComplexEigenSolver<CMat> solver(a, false);
  if (solver.info() != Eigen::Success) return bound;
  return std::min(solver.eigenvalues().cwiseAbs().maxCoeff(), bound);
}

CoupledOperator coupled_operator(const RVec& m, const CMat& xi, const CMat& feed,
                                 double margin) {
  const Eigen::Index n = m.size();
  if (xi.rows() != n || xi.cols() != n || feed.rows() != n) {
    throw InvalidArgument("coupled_operator: shape mismatch between m, Xi and F");
  }
  const CMat dxi = m.cast<cplx>().asDiagonal() * xi;
  const double radius = spectral_radius_estimate(dxi);
  if (radius >= 1.0 - margin) throw IllConditionedCoupling(radius, 1.0 - margin);

  CoupledOperator op;
  op.m = m;
  op.spectral_radius = radius;
  const CMat system = CMat::Identity(n, n) - dxi;
  op.C = system.partialPivLu().inverse();
  op.M = op.C * (m.cast<cplx>().asDiagonal() * feed);
  return op;
}

std::vector<CoupledOperator> coupled_operators(const RVec& m, std::span<const CMat> xi,
                                               std::span<const CMat> feed, double margin) {
  if (xi.size() != feed.size()) {
    throw InvalidArgument("coupled_operators: coupling and feed subband counts differ");
  }
  std::vector<CoupledOperator> ops;
  ops.reserve(xi.size());
  for (std::size_t u = 0; u < xi.size(); ++u) {
    ops.push_back(coupled_operator(m, xi[u], feed[u], margin));
  }
  return ops;
}

CMat operator_jacobian(const CoupledOperator& op, const CMat& xi, const CMat& feed, int n) {
  if (n < 0 || n >= op.m.size()) throw InvalidArgument("operator_jacobian: index out of range");
  // C E_n T keeps only column n of C and row n of T.
  const CRow t_row = xi.row(n) * op.M + feed.row(n);
  return op.C.col(n) * t_row;
}

SurrogateOperator make_surrogate(const CoupledOperator& op, const CMat& xi, const CMat& feed) {
  SurrogateOperator s;
  s.anchor = op.m;
  s.M = op.M;
  s.C = op.C;
  s.T = xi * op.M + feed;
  return s;
}

CMat surrogate_operator(const SurrogateOperator& anchor, const RVec& delta_m) {
  if (delta_m.size() != anchor.anchor.size()) {
    throw InvalidArgument("surrogate_operator: delta size mismatch");
  }
  return anchor.M + anchor.C * (delta_m.cast<cplx>().asDiagonal() * anchor.T);
}

double rhs_power(std::span<const CMat> operators, std::span<const CMat> precoders, double eta) {
  if (operators.size() != precoders.size()) {
    throw InvalidArgument("rhs_power: subband count mismatch");
  }
  double total = 0.0;
  for (std::size_t u = 0; u < operators.size(); ++u) {
    total += (operators[u] * precoders[u]).squaredNorm();
  }
  return eta * total;
}

}  // namespace rhsbf
