#pragma once

#include <span>
#include <vector>

#include "rhsbf/channel.hpp"
#include "rhsbf/rhs_operator.hpp"
#include "rhsbf/types.hpp"

namespace rhsbf {

/// Per-subband digital precoders V_u (L x K).
struct PrecoderSet {
  std::vector<CMat> V;
  double total_power = 0.0;

  static PrecoderSet from(std::vector<CMat> v);
  void refresh_power();
};

/// Per-(k,u) scalar equalizers, MSE and weights, stored K x U.
struct EqualizerState {
  CMat g;
  RMat e;
  RMat w;
};

/// Effective channels hbar_{k,u} = h_{k,u} M_u stacked as K x L per subband.
std::vector<CMat> effective_channels(const ChannelSet& channels,
                                     std::span<const CoupledOperator> operators);

/// gamma_{k,u}, K x U.
RMat sinr_effective(std::span<const CMat> hbar, const ChannelSet& channels,
                    const PrecoderSet& precoders);
RMat sinr(const ChannelSet& channels, std::span<const CoupledOperator> operators,
          const PrecoderSet& precoders);

struct Objectives {
  double sum_rate_bps = 0.0;  // B_g * sum log2(1 + gamma)
  double sum_se = 0.0;        // sum log2(1 + gamma), bit/s/Hz
  double J = 0.0;             // sum (1 - ln(1 + gamma))
};
Objectives objectives(const RMat& gamma, double subband_width);

/// MMSE equalizers and weights for the current precoders.
EqualizerState mmse_update_effective(std::span<const CMat> hbar, const ChannelSet& channels,
                                     const PrecoderSet& precoders);
EqualizerState mmse_update(const ChannelSet& channels,
                           std::span<const CoupledOperator> operators,
                           const PrecoderSet& precoders);

/// MSE of one link for an arbitrary equalizer g.
double link_mse(const CMat& hbar_u, int k, const CMat& v_u, double sigma2, cplx g);

/// sum_{k,u} (w e(g) - ln w) for the given equalizer state (e re-evaluated at g).
double wmmse_objective(std::span<const CMat> hbar, const ChannelSet& channels,
                       const PrecoderSet& precoders, const EqualizerState& eq);

struct PrecoderQP {
  std::vector<CMat> A;  // L x L, Hermitian PSD
  std::vector<CMat> B;  // L x K
};

PrecoderQP precoder_qp_assemble_effective(std::span<const CMat> hbar,
                                          const EqualizerState& eq);
PrecoderQP precoder_qp_assemble(const ChannelSet& channels,
                                std::span<const CoupledOperator> operators,
                                const EqualizerState& eq);

struct PrecoderUpdate {
  PrecoderSet precoders;
  double lambda = 0.0;
  int bisection_steps = 0;
};

/// Power of V(lambda) = (A + lambda I)^{-1} B summed over subbands.
class PowerFunction {
 public:
  explicit PowerFunction(const PrecoderQP& qp);

  /// +inf when lambda == 0 and some B component lies in the null space of A.
  double operator()(double lambda) const;
  std::vector<CMat> precoders(double lambda) const;

 private:
  struct Subband {
    CMat basis;    // eigenvectors of A
    RVec eig;      // eigenvalues of A, clamped at zero
    CMat coeffs;   // basis^H B
    std::vector<bool> null_dir;  // eigen-directions treated as null at lambda = 0
    bool unbounded_at_zero = false;
  };
  std::vector<Subband> subbands_;
};

PrecoderUpdate precoder_update(const PrecoderQP& qp, double p_bs, double bisection_tol = 1e-8);

/// Matched filters hbar^H / ||hbar|| scaled so the total power equals p_bs.
PrecoderSet matched_filter_precoders(std::span<const CMat> hbar, double p_bs);

}  // namespace rhsbf
