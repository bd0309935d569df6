#pragma once

#include <span>
#include <vector>

#include "rhsbf/channel.hpp"
#include "rhsbf/em_coupling.hpp"
#include "rhsbf/types.hpp"

namespace rhsbf {

/// Guided reference wave: k_s = n_eff * k_u, radial phase over the
/// feeder-to-element path length.
struct FeedConfig {
  double effective_index = 1.7320508075688772;  // sqrt(3), eps_r = 3 substrate

  void validate() const;
};

/// N x L, [F]_{n,l} = exp(-j n_eff k_u |r_n - r_l|).
CMat build_feed_matrix(const ArrayGeometry& geometry, const FeedConfig& feed, double frequency,
                       const MediumParams& medium);

struct HologramState {
  RVec m;        // amplitudes in [0,1]
  RMat weights;  // K x L HDMA weights, nonnegative, summing to one
};

RMat uniform_hdma_weights(int num_users, int num_feeders);

/// m_n = sum_{k,l} a_{k,l} (cos(k_s |r_n^l| - k_f(theta_k) . r_n) + 1) / 2.
HologramState init_hologram_hdma(const ArrayGeometry& geometry,
                                 const std::vector<UserLocation>& users, const FeedConfig& feed,
                                 double reference_frequency, const RMat& weights,
                                 const MediumParams& medium);

inline constexpr double kDefaultSpectralMargin = 0.05;

/// Spectral radius, or the induced 1/inf norm bound when that bound is at
/// most kCertifiedBound (then it already proves stability).
inline constexpr double kCertifiedBound = 0.5;
double spectral_radius_estimate(const CMat& a);

/// C = (I - D(m) Xi)^{-1} and M = C D(m) F for one subband.
struct CoupledOperator {
  RVec m;
  CMat C;
  CMat M;
  double spectral_radius = 0.0;
};

CoupledOperator coupled_operator(const RVec& m, const CMat& xi, const CMat& feed,
                                 double margin = kDefaultSpectralMargin);

std::vector<CoupledOperator> coupled_operators(const RVec& m, std::span<const CMat> xi,
                                               std::span<const CMat> feed,
                                               double margin = kDefaultSpectralMargin);

/// dM/dm_n = C E_n (Xi M + F).
CMat operator_jacobian(const CoupledOperator& op, const CMat& xi, const CMat& feed, int n);

/// First-order model of M around an anchor: M + C D(dm) T with T = Xi M + F.
struct SurrogateOperator {
  RVec anchor;
  CMat M;
  CMat C;
  CMat T;
};

SurrogateOperator make_surrogate(const CoupledOperator& op, const CMat& xi, const CMat& feed);
CMat surrogate_operator(const SurrogateOperator& anchor, const RVec& delta_m);

/// eta * sum_u ||M_u V_u||_F^2.
double rhs_power(std::span<const CMat> operators, std::span<const CMat> precoders, double eta);

}  // namespace rhsbf
