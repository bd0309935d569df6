#include "rhsbf/hologram_qp.hpp"

#include <cmath>

#include "rhsbf/errors.hpp"

namespace rhsbf {

double HologramQP::model_objective(const RVec& y) const {
  return y.dot(Q * y) - 2.0 * q.real().dot(y);
}

RVec HologramQP::gradient(const RVec& y) const { return 2.0 * (Q * y) - 2.0 * q.real(); }

double HologramQP::model_power(const RVec& y) const {
  double total = 0.0;
  for (std::size_t u = 0; u < R.size(); ++u) {
    total += y.dot(R[u] * y) + 2.0 * b[u].dot(y) + c[u];
  }
  return total;
}

CMat hologram_link_coefficients(const CRow& h, const CMat& C, const CMat& T, const CMat& V) {
  const CRow r = h * C;
  const CMat f = T * V;  // column i = T v_i
  CMat a(f.rows(), f.cols());
  for (Eigen::Index i = 0; i < f.cols(); ++i) {
    a.col(i) = (r.transpose().array() * f.col(i).array()).conjugate().matrix();
  }
  return a;
}

namespace {

RMat symmetrized(const RMat& a) { return 0.5 * (a + a.transpose()); }

// Shared assembly. anchor_M == nullptr selects freeze mode (z0 = 0, no linear power term).
void accumulate_subband(HologramQP& qp, const ChannelSet& channels, int u, const CMat& C,
                        const CMat& T, const CMat* anchor_M, const EqualizerState& eq,
                        const CMat& V) {
  const Eigen::Index n = C.rows();
  for (int k = 0; k < channels.num_users(); ++k) {
    const CRow& h = channels.rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(u)];
    const double w = eq.w(k, u);
    const cplx g = eq.g(k, u);
    const double g2 = std::norm(g);
    const double sigma2 = channels.noise[static_cast<std::size_t>(k)][static_cast<std::size_t>(u)];
    const CMat a = hologram_link_coefficients(h, C, T, V);

    CRow z0 = CRow::Zero(V.cols());
    if (anchor_M != nullptr) z0 = h * (*anchor_M) * V;

    qp.Q.noalias() += (w * g2) * (a * a.adjoint()).real();
    CVec lin = g * a.col(k);
    for (Eigen::Index i = 0; i < a.cols(); ++i) lin -= (g2 * z0(i)) * a.col(i);
    qp.q += w * lin;

    const double e0 = g2 * (z0.squaredNorm() + sigma2) - 2.0 * std::real(std::conj(g) * z0(k)) + 1.0;
    qp.constant += w * e0 - std::log(w);
  }

  const CMat Y = T * V;
  const CMat G = C.adjoint() * C;
  const CMat S = Y * Y.adjoint();
  qp.R.push_back(symmetrized(G.cwiseProduct(S.transpose()).real()));
  if (anchor_M != nullptr) {
    const CMat X = (*anchor_M) * V;
    const CMat cx = C.transpose() * X.conjugate();  // (C^T conj X)_{n,k}
    qp.b.push_back(Y.cwiseProduct(cx).rowwise().sum().real());
    qp.c.push_back(X.squaredNorm());
  } else {
    qp.b.push_back(RVec::Zero(n));
    qp.c.push_back(0.0);
  }
}

void check_counts(const ChannelSet& channels, std::size_t operators, const PrecoderSet& precoders) {
  if (static_cast<int>(operators) != channels.num_subbands() ||
      precoders.V.size() != operators) {
    throw InvalidArgument("hologram assembly: subband count mismatch");
  }
}

}  // namespace

HologramQP hologram_qp_freeze_assemble(const ChannelSet& channels,
                                       std::span<const CoupledOperator> operators,
                                       std::span<const CMat> feed, const EqualizerState& eq,
                                       const PrecoderSet& precoders) {
  check_counts(channels, operators.size(), precoders);
  if (feed.size() != operators.size()) {
    throw InvalidArgument("hologram assembly: feed count mismatch");
  }
  const Eigen::Index n = operators.empty() ? 0 : operators[0].C.rows();
  HologramQP qp;
  qp.mode = HologramUpdate::freeze;
  qp.Q = RMat::Zero(n, n);
  qp.q = CVec::Zero(n);
  qp.anchor = RVec::Zero(n);
  for (std::size_t u = 0; u < operators.size(); ++u) {
    accumulate_subband(qp, channels, static_cast<int>(u), operators[u].C, feed[u], nullptr, eq,
                       precoders.V[u]);
  }
  qp.Q = symmetrized(qp.Q);
  return qp;
}

HologramQP hologram_qcqp_jacobian_assemble(const ChannelSet& channels,
                                           std::span<const SurrogateOperator> anchor,
                                           const EqualizerState& eq,
                                           const PrecoderSet& precoders) {
  check_counts(channels, anchor.size(), precoders);
  const Eigen::Index n = anchor.empty() ? 0 : anchor[0].C.rows();
  HologramQP qp;
  qp.mode = HologramUpdate::jacobian;
  qp.Q = RMat::Zero(n, n);
  qp.q = CVec::Zero(n);
  qp.anchor = anchor.empty() ? RVec() : anchor[0].anchor;
  for (std::size_t u = 0; u < anchor.size(); ++u) {
    accumulate_subband(qp, channels, static_cast<int>(u), anchor[u].C, anchor[u].T, &anchor[u].M,
                       eq, precoders.V[u]);
  }
  qp.Q = symmetrized(qp.Q);
  return qp;
}

HologramStepResult hologram_step(const HologramQP& qp, const RVec& m_current, double p_rhs,
                                 double eta, const HologramStepOptions& options) {
  const Eigen::Index n = m_current.size();
  if (qp.Q.rows() != n || qp.anchor.size() != n) {
    throw InvalidArgument("hologram_step: QP size differs from m");
  }
  if (!(options.step_size > 0.0) || options.max_iter < 0) {
    throw InvalidArgument("hologram_step: step size must be positive");
  }
  const RVec lo = -qp.anchor;
  const RVec hi = RVec::Ones(n) - qp.anchor;
  auto power = [&](const RVec& y) { return eta * qp.model_power(y); };
  auto feasible = [&](const RVec& y) { return !options.enforce_power || power(y) <= p_rhs; };

  HologramStepResult out;
  RVec y = (m_current.cwiseMax(0.0).cwiseMin(1.0)) - qp.anchor;

  if (!feasible(y)) {
    out.restored = true;
    const RVec m0 = y + qp.anchor;
    auto scaled = [&](double s) { return RVec(s * m0 - qp.anchor); };
    if (!feasible(scaled(0.0))) {
      out.restore_failed = true;
      out.m = RVec::Zero(n);
      out.model_power = power(scaled(0.0));
      return out;
    }
    double s_lo = 0.0;
    double s_hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (s_lo + s_hi);
      if (feasible(scaled(mid))) {
        s_lo = mid;
      } else {
        s_hi = mid;
      }
    }
    y = scaled(s_lo);
  }

  double f = qp.model_objective(y);
  double step = options.step_size;
  for (int it = 0; it < options.max_iter; ++it) {
    const RVec grad = qp.gradient(y);
    bool accepted = false;
    int halvings = 0;
    RVec y_new;
    double f_new = f;
    for (; halvings <= options.max_halvings; ++halvings) {
      y_new = (y - step * grad).cwiseMax(lo).cwiseMin(hi);
      const double decrease = grad.dot(y_new - y);
      f_new = qp.model_objective(y_new);
      if (f_new <= f + options.armijo * decrease && feasible(y_new)) {
        accepted = true;
        break;
      }
      step *= 0.5;
      ++out.backtracks;
    }
    out.iterations = it + 1;
    if (!accepted) break;
    const double moved = (y_new - y).norm();
    y = std::move(y_new);
    f = f_new;
    if (moved <= 1e-12 * (1.0 + y.norm())) break;
    if (halvings == 0) step *= 2.0;
  }

  out.m = (y + qp.anchor).cwiseMax(0.0).cwiseMin(1.0);
  out.model_power = power(out.m - qp.anchor);
  return out;
}

}  // namespace rhsbf
