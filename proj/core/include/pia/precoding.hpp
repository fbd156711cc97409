#pragma once

#include <armadillo>
#include <vector>

#include "pia/channel.hpp"

namespace pia {

/// Optimal power allocation over parallel channels with gains g_k (1/W) and
/// a total budget: d_k = max(0, mu - 1/g_k) with the water level mu solved
/// exactly by the sorted-thresholds method. Streams with zero gain receive
/// zero power. `any_allocated` is false when every gain is zero.
struct WaterfillResult {
  std::vector<double> powers;  // watts, same order as the input gains
  double water_level = 0.0;    // mu; 0 when nothing was allocated
  bool any_allocated = false;
};

WaterfillResult waterfill(const std::vector<double>& gains, double p_max);

/// Block-diagonalization precoders for one channel set: each user's precoder
/// lives in the null space of all other users' stacked channels, with the
/// per-stream powers chosen by joint water-filling across every user's
/// streams under the single total power budget.
struct PrecoderSet {
  std::vector<arma::cx_mat> precoders;    // W_i, M x n_i
  std::vector<arma::vec> stream_powers;   // diagonal of D_i, watts
  std::vector<arma::vec> stream_gains;    // singular values of H_i * null basis
  double water_level = 0.0;
  bool any_allocated = false;

  /// Streams kept for user i (n_i).
  int streams(std::size_t i) const {
    return static_cast<int>(stream_gains[i].n_elem);
  }
};

/// Orthonormal basis for the null space of `stacked` (rows x M, rows < M for
/// a nonempty result). Rank is decided by singular values above 1e-12 of the
/// largest. Throws NumericalError when the null space is empty, which in the
/// BD chain signals a violated M >= N*K assumption.
arma::cx_mat null_space_basis(const arma::cx_mat& stacked);

PrecoderSet bd_precoders(const ChannelSet& channels, double noise_w,
                         double p_max);

/// Shannon rate log2 det(I + H W W^H H^H / noise) in bit/s/Hz, evaluated
/// through the Gram matrix of the smaller dimension. Throws NumericalError
/// on non-finite inputs.
double user_rate(const arma::cx_mat& channel, const arma::cx_mat& precoder,
                 double noise_w);

struct RateResult {
  double sum = 0.0;                // bit/s/Hz
  std::vector<double> per_user;
};

/// BD precoding followed by per-user rate evaluation.
RateResult sum_rate(const ChannelSet& channels, double noise_w, double p_max);

}  // namespace pia
