#include "pia/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pia/errors.hpp"

namespace pia {

namespace {

constexpr double kRankThreshold = 1e-12;  // relative to the largest singular value
constexpr double kInvLn2 = 1.4426950408889634;

}  // namespace

WaterfillResult waterfill(const std::vector<double>& gains, double p_max) {
  if (!(p_max > 0.0)) throw std::invalid_argument("waterfill: p_max must be positive");
  for (double g : gains)
    if (!(g >= 0.0) || !std::isfinite(g))
      throw std::invalid_argument("waterfill: gains must be finite and >= 0");

  WaterfillResult result;
  result.powers.assign(gains.size(), 0.0);

  // Sort inverse gains ascending; the active set is a prefix.
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < gains.size(); ++k)
    if (gains[k] > 0.0) order.push_back(k);
  if (order.empty()) return result;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return 1.0 / gains[a] < 1.0 / gains[b];
  });

  // Largest prefix s with mu(s) = (p + sum_{k<=s} 1/g_k) / s above its own
  // threshold keeps every active stream positive.
  std::size_t active = 0;
  double mu = 0.0;
  double prefix = 0.0;
  for (std::size_t s = 0; s < order.size(); ++s) {
    const double inv_gain = 1.0 / gains[order[s]];
    prefix += inv_gain;
    const double candidate = (p_max + prefix) / static_cast<double>(s + 1);
    if (candidate > inv_gain) {
      active = s + 1;
      mu = candidate;
    }
  }

  double total = 0.0;
  for (std::size_t s = 0; s < active; ++s) {
    const double d = std::max(0.0, mu - 1.0 / gains[order[s]]);
    result.powers[order[s]] = d;
    total += d;
  }
  // Rescale away the rounding in mu so the budget is met exactly.
  if (total > 0.0) {
    const double scale = p_max / total;
    for (std::size_t s = 0; s < active; ++s) result.powers[order[s]] *= scale;
  }
  result.water_level = mu;
  result.any_allocated = active > 0;
  return result;
}

arma::cx_mat null_space_basis(const arma::cx_mat& stacked) {
  const arma::uword m = stacked.n_cols;
  if (m == 0) throw std::invalid_argument("null_space_basis: empty matrix");
  if (stacked.n_rows == 0) return arma::cx_mat(arma::eye<arma::cx_mat>(m, m));

  arma::cx_mat u, v;
  arma::vec s;
  if (!arma::svd(u, s, v, stacked))
    throw NumericalError("null_space_basis: SVD failed to converge");

  const double s_max = s.empty() ? 0.0 : s.max();
  arma::uword rank = 0;
  if (s_max > 0.0)
    for (arma::uword k = 0; k < s.n_elem; ++k)
      if (s(k) > kRankThreshold * s_max) ++rank;

  if (rank >= m)
    throw NumericalError(
        "null_space_basis: interference channel has full column rank; the "
        "BS needs at least as many antennas as all served UE antennas");
  return v.cols(rank, m - 1);
}

PrecoderSet bd_precoders(const ChannelSet& channels, double noise_w,
                         double p_max) {
  const int k_users = channels.users();
  if (k_users < 1) throw std::invalid_argument("bd_precoders: no channels");
  if (!(noise_w > 0.0)) throw std::invalid_argument("bd_precoders: noise must be positive");
  const arma::uword n = channels.per_user[0].n_rows;
  const arma::uword m = channels.per_user[0].n_cols;
  for (const arma::cx_mat& h : channels.per_user)
    if (h.n_rows != n || h.n_cols != m)
      throw std::invalid_argument("bd_precoders: inconsistent channel shapes");

  PrecoderSet set;
  set.precoders.resize(k_users);
  set.stream_gains.resize(k_users);
  set.stream_powers.resize(k_users);

  std::vector<arma::cx_mat> null_bases(k_users);
  std::vector<arma::cx_mat> right_vectors(k_users);
  std::vector<double> gains;  // flattened sigma^2 / noise across all users
  std::vector<std::pair<int, int>> gain_owner;

  for (int i = 0; i < k_users; ++i) {
    // Stack every other user's channel; its null space is where user i's
    // precoder must live.
    arma::cx_mat stacked(n * (k_users - 1), m);
    arma::uword row = 0;
    for (int j = 0; j < k_users; ++j) {
      if (j == i) continue;
      stacked.rows(row, row + n - 1) = channels.per_user[j];
      row += n;
    }
    null_bases[i] = null_space_basis(stacked);

    const arma::cx_mat effective = channels.per_user[i] * null_bases[i];
    arma::cx_mat u, v;
    arma::vec s;
    if (!arma::svd_econ(u, s, v, effective))
      throw NumericalError("bd_precoders: SVD of the effective channel failed");

    const arma::uword streams = std::min<arma::uword>(n, null_bases[i].n_cols);
    arma::vec sigma = s.head(streams);
    // Effectively-zero directions keep their stream slot but zero gain, so
    // water-filling starves them instead of the rank decision oscillating.
    const double s_max = sigma.empty() ? 0.0 : sigma.max();
    right_vectors[i] = v.cols(0, streams - 1);
    set.stream_gains[i] = sigma;
    for (arma::uword t = 0; t < streams; ++t) {
      const double effective_gain =
          (s_max > 0.0 && sigma(t) > kRankThreshold * s_max)
              ? sigma(t) * sigma(t) / noise_w
              : 0.0;
      gains.push_back(effective_gain);
      gain_owner.emplace_back(i, static_cast<int>(t));
    }
  }

  const WaterfillResult wf = waterfill(gains, p_max);
  set.water_level = wf.water_level;
  set.any_allocated = wf.any_allocated;

  for (int i = 0; i < k_users; ++i)
    set.stream_powers[i].zeros(set.stream_gains[i].n_elem);
  for (std::size_t flat = 0; flat < gain_owner.size(); ++flat)
    set.stream_powers[gain_owner[flat].first](gain_owner[flat].second) =
        wf.powers[flat];

  for (int i = 0; i < k_users; ++i) {
    const arma::vec& d = set.stream_powers[i];
    set.precoders[i] =
        null_bases[i] * right_vectors[i] * arma::diagmat(arma::sqrt(d));
  }
  return set;
}

double user_rate(const arma::cx_mat& channel, const arma::cx_mat& precoder,
                 double noise_w) {
  if (!(noise_w > 0.0)) throw std::invalid_argument("user_rate: noise must be positive");
  if (!channel.is_finite() || !precoder.is_finite())
    throw NumericalError("user_rate: non-finite input");
  if (precoder.n_cols == 0) return 0.0;
  if (channel.n_cols != precoder.n_rows)
    throw std::invalid_argument("user_rate: channel/precoder shapes do not match");

  const arma::cx_mat a = channel * precoder;  // N x n
  const arma::cx_mat gram =
      (a.n_rows <= a.n_cols) ? arma::cx_mat(a * a.t()) : arma::cx_mat(a.t() * a);
  arma::vec eigenvalues;
  if (!arma::eig_sym(eigenvalues, gram))
    throw NumericalError("user_rate: eigendecomposition failed");

  double rate = 0.0;
  for (double ev : eigenvalues)
    if (ev > 0.0) rate += std::log1p(ev / noise_w) * kInvLn2;
  return rate;
}

RateResult sum_rate(const ChannelSet& channels, double noise_w, double p_max) {
  const PrecoderSet precoders = bd_precoders(channels, noise_w, p_max);
  RateResult result;
  result.per_user.reserve(channels.users());
  for (int i = 0; i < channels.users(); ++i) {
    const double r =
        user_rate(channels.per_user[i], precoders.precoders[i], noise_w);
    result.per_user.push_back(r);
    result.sum += r;
  }
  return result;
}

}  // namespace pia
