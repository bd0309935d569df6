#include "rhsbf/wmmse.hpp"

#include <cmath>
#include <limits>

#include "rhsbf/errors.hpp"

namespace rhsbf {

PrecoderSet PrecoderSet::from(std::vector<CMat> v) {
  PrecoderSet set;
  set.V = std::move(v);
  set.refresh_power();
  return set;
}

void PrecoderSet::refresh_power() {
  total_power = 0.0;
  for (const CMat& v : V) total_power += v.squaredNorm();
}

std::vector<CMat> effective_channels(const ChannelSet& channels,
                                     std::span<const CoupledOperator> operators) {
  const int num_users = channels.num_users();
  const int num_subbands = channels.num_subbands();
  if (static_cast<int>(operators.size()) != num_subbands) {
    throw InvalidArgument("effective_channels: operator count differs from subband count");
  }
  std::vector<CMat> hbar;
  hbar.reserve(static_cast<std::size_t>(num_subbands));
  for (int u = 0; u < num_subbands; ++u) {
    const CMat& M = operators[static_cast<std::size_t>(u)].M;
    CMat h(num_users, M.cols());
    for (int k = 0; k < num_users; ++k) {
      h.row(k) = channels.rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(u)] * M;
    }
    hbar.push_back(std::move(h));
  }
  return hbar;
}

namespace {

void check_shapes(std::span<const CMat> hbar, const ChannelSet& channels,
                  const PrecoderSet& precoders) {
  if (hbar.size() != precoders.V.size() ||
      static_cast<int>(hbar.size()) != channels.num_subbands()) {
    throw InvalidArgument("subband count mismatch between channels and precoders");
  }
  for (std::size_t u = 0; u < hbar.size(); ++u) {
    if (hbar[u].cols() != precoders.V[u].rows() || hbar[u].rows() != precoders.V[u].cols()) {
      throw InvalidArgument("precoder shape must be L x K");
    }
  }
}

double noise_of(const ChannelSet& channels, int k, int u) {
  return channels.noise[static_cast<std::size_t>(k)][static_cast<std::size_t>(u)];
}

}  // namespace

RMat sinr_effective(std::span<const CMat> hbar, const ChannelSet& channels,
                    const PrecoderSet& precoders) {
  check_shapes(hbar, channels, precoders);
  const int num_users = channels.num_users();
  RMat gamma(num_users, static_cast<Eigen::Index>(hbar.size()));
  for (std::size_t u = 0; u < hbar.size(); ++u) {
    const RMat gains = (hbar[u] * precoders.V[u]).cwiseAbs2();  // [k][i] = |hbar_k v_i|^2
    for (int k = 0; k < num_users; ++k) {
      const double signal = gains(k, k);
      const double interference = gains.row(k).sum() - signal;
      gamma(k, static_cast<Eigen::Index>(u)) =
          signal / (noise_of(channels, k, static_cast<int>(u)) + interference);
    }
  }
  return gamma;
}

RMat sinr(const ChannelSet& channels, std::span<const CoupledOperator> operators,
          const PrecoderSet& precoders) {
  const auto hbar = effective_channels(channels, operators);
  return sinr_effective(hbar, channels, precoders);
}

Objectives objectives(const RMat& gamma, double subband_width) {
  Objectives out;
  double ln_sum = 0.0;
  for (Eigen::Index i = 0; i < gamma.size(); ++i) {
    ln_sum += std::log1p(gamma.data()[i]);
  }
  out.sum_se = ln_sum / std::log(2.0);
  out.sum_rate_bps = subband_width * out.sum_se;
  out.J = static_cast<double>(gamma.size()) - ln_sum;
  return out;
}

EqualizerState mmse_update_effective(std::span<const CMat> hbar, const ChannelSet& channels,
                                     const PrecoderSet& precoders) {
  check_shapes(hbar, channels, precoders);
  const int num_users = channels.num_users();
  const auto num_subbands = static_cast<Eigen::Index>(hbar.size());
  EqualizerState eq;
  eq.g = CMat::Zero(num_users, num_subbands);
  eq.e = RMat::Ones(num_users, num_subbands);
  eq.w = RMat::Ones(num_users, num_subbands);
  for (Eigen::Index u = 0; u < num_subbands; ++u) {
    const CMat z = hbar[static_cast<std::size_t>(u)] * precoders.V[static_cast<std::size_t>(u)];
    for (int k = 0; k < num_users; ++k) {
      const double sigma2 = noise_of(channels, k, static_cast<int>(u));
      double other = sigma2;
      for (Eigen::Index i = 0; i < z.cols(); ++i) {
        if (i != k) other += std::norm(z(k, i));
      }
      const double total = other + std::norm(z(k, k));
      eq.g(k, u) = z(k, k) / total;
      // e = 1/(1+gamma), formed without subtracting the signal power
      eq.e(k, u) = other / total;
      eq.w(k, u) = 1.0 / eq.e(k, u);
    }
  }
  return eq;
}

EqualizerState mmse_update(const ChannelSet& channels,
                           std::span<const CoupledOperator> operators,
                           const PrecoderSet& precoders) {
  const auto hbar = effective_channels(channels, operators);
  return mmse_update_effective(hbar, channels, precoders);
}

double link_mse(const CMat& hbar_u, int k, const CMat& v_u, double sigma2, cplx g) {
  const CRow z = hbar_u.row(k) * v_u;
  double other = sigma2;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (i != k) other += std::norm(z(i));
  }
  return std::norm(g) * other + std::norm(std::conj(g) * z(k) - 1.0);
}

double wmmse_objective(std::span<const CMat> hbar, const ChannelSet& channels,
                       const PrecoderSet& precoders, const EqualizerState& eq) {
  check_shapes(hbar, channels, precoders);
  double total = 0.0;
  for (std::size_t u = 0; u < hbar.size(); ++u) {
    for (int k = 0; k < channels.num_users(); ++k) {
      const auto uu = static_cast<Eigen::Index>(u);
      const double e = link_mse(hbar[u], k, precoders.V[u], noise_of(channels, k, static_cast<int>(u)),
                                eq.g(k, uu));
      total += eq.w(k, uu) * e - std::log(eq.w(k, uu));
    }
  }
  return total;
}

PrecoderQP precoder_qp_assemble_effective(std::span<const CMat> hbar,
                                          const EqualizerState& eq) {
  PrecoderQP qp;
  for (std::size_t u = 0; u < hbar.size(); ++u) {
    const auto uu = static_cast<Eigen::Index>(u);
    const CMat& h = hbar[u];  // K x L, row k = hbar_k
    const Eigen::Index num_users = h.rows();
    const Eigen::Index num_feeders = h.cols();
    CMat A = CMat::Zero(num_feeders, num_feeders);
    CMat B(num_feeders, num_users);
    for (Eigen::Index k = 0; k < num_users; ++k) {
      const CVec h_tilde = h.row(k).adjoint();
      A.noalias() += (eq.w(k, uu) * std::norm(eq.g(k, uu))) * (h_tilde * h_tilde.adjoint());
      B.col(k) = (eq.w(k, uu) * eq.g(k, uu)) * h_tilde;
    }
    // Symmetrize away rounding so the eigensolver sees an exactly Hermitian matrix.
    A = 0.5 * (A + A.adjoint()).eval();
    qp.A.push_back(std::move(A));
    qp.B.push_back(std::move(B));
  }
  return qp;
}

PrecoderQP precoder_qp_assemble(const ChannelSet& channels,
                                std::span<const CoupledOperator> operators,
                                const EqualizerState& eq) {
  const auto hbar = effective_channels(channels, operators);
  return precoder_qp_assemble_effective(hbar, eq);
}

PowerFunction::PowerFunction(const PrecoderQP& qp) {
  if (qp.A.size() != qp.B.size()) throw InvalidArgument("PowerFunction: A/B count mismatch");
  double scale = 0.0;
  for (const CMat& a : qp.A) scale = std::max(scale, a.cwiseAbs().maxCoeff());

  for (std::size_t u = 0; u < qp.A.size(); ++u) {
    Subband sb;
    Eigen::SelfAdjointEigenSolver<CMat> solver(qp.A[u]);
    if (solver.info() != Eigen::Success) {
      throw NumericFailure("precoder_update: Hermitian eigendecomposition failed");
    }
    sb.basis = solver.eigenvectors();
    sb.eig = solver.eigenvalues().cwiseMax(0.0);
    sb.coeffs = sb.basis.adjoint() * qp.B[u];
    const double b_norm = qp.B[u].norm();
    const double eig_floor = 1e-13 * scale * static_cast<double>(qp.A[u].rows());
    sb.null_dir.assign(static_cast<std::size_t>(sb.eig.size()), false);
    for (Eigen::Index i = 0; i < sb.eig.size(); ++i) {
      if (sb.eig(i) <= eig_floor) {
        sb.null_dir[static_cast<std::size_t>(i)] = true;
        if (sb.coeffs.row(i).norm() > 1e-9 * b_norm && b_norm > 0.0) {
          sb.unbounded_at_zero = true;
        }
      }
    }
    subbands_.push_back(std::move(sb));
  }
}

double PowerFunction::operator()(double lambda) const {
  double total = 0.0;
  for (const Subband& sb : subbands_) {
    if (lambda == 0.0 && sb.unbounded_at_zero) return std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < sb.eig.size(); ++i) {
      if (lambda == 0.0 && sb.null_dir[static_cast<std::size_t>(i)]) continue;
      const double denom = sb.eig(i) + lambda;
      total += sb.coeffs.row(i).squaredNorm() / (denom * denom);
    }
  }
  return total;
}

std::vector<CMat> PowerFunction::precoders(double lambda) const {
  std::vector<CMat> out;
  out.reserve(subbands_.size());
  for (const Subband& sb : subbands_) {
    RVec inv(sb.eig.size());
    for (Eigen::Index i = 0; i < sb.eig.size(); ++i) {
      const bool drop = lambda == 0.0 && sb.null_dir[static_cast<std::size_t>(i)];
      inv(i) = drop ? 0.0 : 1.0 / (sb.eig(i) + lambda);
    }
    out.push_back(sb.basis * (inv.cast<cplx>().asDiagonal() * sb.coeffs));
  }
  return out;
}

PrecoderUpdate precoder_update(const PrecoderQP& qp, double p_bs, double bisection_tol) {
  if (!(p_bs > 0.0)) throw InvalidArgument("precoder_update: P_BS must be positive");
  const PowerFunction power(qp);
  PrecoderUpdate out;

  if (power(0.0) <= p_bs) {
    out.precoders = PrecoderSet::from(power.precoders(0.0));
    return out;
  }

  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (power(hi) > p_bs) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 200) {
      throw NumericFailure("precoder_update: dual bracket not found after 200 doublings");
    }
  }
  // Bisection to the resolution of double; hi always stays feasible.
  int steps = 0;
  while (hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi && steps < 2000) {
    const double mid = 0.5 * (lo + hi);
    if (power(mid) > p_bs) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++steps;
  }
  const double achieved = power(hi);
  if (std::abs(achieved - p_bs) > bisection_tol * p_bs) {
    throw NumericFailure("precoder_update: bisection did not reach the power budget");
  }
  out.lambda = hi;
  out.bisection_steps = steps;
  out.precoders = PrecoderSet::from(power.precoders(hi));
  return out;
}

PrecoderSet matched_filter_precoders(std::span<const CMat> hbar, double p_bs) {
  std::vector<CMat> v;
  v.reserve(hbar.size());
  double total = 0.0;
  for (const CMat& h : hbar) {
    CMat vu = CMat::Zero(h.cols(), h.rows());
    for (Eigen::Index k = 0; k < h.rows(); ++k) {
      const double norm = h.row(k).norm();
      if (norm > 0.0) vu.col(k) = h.row(k).adjoint() / norm;
    }
    total += vu.squaredNorm();
    v.push_back(std::move(vu));
  }
  if (total > 0.0) {
    const double scale = std::sqrt(p_bs / total);
    for (CMat& vu : v) vu *= scale;
  }
  return PrecoderSet::from(std::move(v));
}

}  // namespace rhsbf
