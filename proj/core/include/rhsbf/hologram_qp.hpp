#pragma once

#include <span>
#include <vector>

#include "rhsbf/channel.hpp"
#include "rhsbf/rhs_operator.hpp"
#include "rhsbf/types.hpp"
#include "rhsbf/wmmse.hpp"

namespace rhsbf {

enum class HologramUpdate { freeze, jacobian };

/// Real quadratic model of the weighted MSE and of the RHS power in a real
/// variable y.
///
///   wmse(y)  = y^T Q y - 2 Re(q)^T y + constant
///   power(y) = eta * sum_u (y^T R_u y + 2 b_u^T y + c_u)
///
/// In freeze mode y = m (anchor is zero, b = c = 0). In jacobian mode
/// y = m - anchor.
struct HologramQP {
  HologramUpdate mode = HologramUpdate::freeze;
  RMat Q;
  CVec q;
  std::vector<RMat> R;
  std::vector<RVec> b;
  std::vector<double> c;
  RVec anchor;
  double constant = 0.0;

  /// y^T Q y - 2 Re(q)^T y, without the constant.
  double model_objective(const RVec& y) const;
  double model_wmse(const RVec& y) const { return model_objective(y) + constant; }
  RVec gradient(const RVec& y) const;
  /// Power model without eta.
  double model_power(const RVec& y) const;
};

/// a_{k,i,u} = conj((h_{k,u} C_u)^T .* F_u v_{i,u}); M = C D(m) F with C frozen.
HologramQP hologram_qp_freeze_assemble(const ChannelSet& channels,
                                       std::span<const CoupledOperator> operators,
                                       std::span<const CMat> feed, const EqualizerState& eq,
                                       const PrecoderSet& precoders);

/// Same construction around the first-order surrogate M + C D(dm) T.
HologramQP hologram_qcqp_jacobian_assemble(const ChannelSet& channels,
                                           std::span<const SurrogateOperator> anchor,
                                           const EqualizerState& eq,
                                           const PrecoderSet& precoders);

/// Per-(k,i) coefficient vectors of one subband as columns: column i of the
/// result for user k is a_{k,i,u}. Exposed for oracle tests.
CMat hologram_link_coefficients(const CRow& h, const CMat& C, const CMat& T, const CMat& V);

struct HologramStepOptions {
  double step_size = 0.05;  // initial trial step
  int max_iter = 50;
  int max_halvings = 60;
  double armijo = 1e-4;
  bool enforce_power = true;
};

struct HologramStepResult {
  RVec m;
  int iterations = 0;
  int backtracks = 0;
  bool restored = false;         // start point was infeasible and got scaled toward zero
  bool restore_failed = false;   // even m = 0 violates the power model
  double model_power = 0.0;      // eta * power model at the returned point
};

/// Projected gradient on the box [0,1]^N with the power model enforced by
/// step halving.
HologramStepResult hologram_step(const HologramQP& qp, const RVec& m_current, double p_rhs,
                                 double eta, const HologramStepOptions& options = {});

}  // namespace rhsbf
