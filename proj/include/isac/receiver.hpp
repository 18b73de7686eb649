#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "isac/channel.hpp"
#include "isac/constants.hpp"
#include "isac/grid.hpp"
#include "isac/signal.hpp"
#include "isac/transform.hpp"

namespace isac {

/// Per-UE communication reception summary.
struct UeReport {
  double sdnr_ft = 0.0;        // empirical, linear
  double sdnr_ft_bound = 0.0;  // closed-form upper bound, linear
  double rate = 0.0;           // bit/s/Hz
  bool cancellation = false;
};

/// One extracted sensing peak.
struct Detection {
  double tau_s = 0.0;
  double nu_hz = 0.0;
  double peak_power = 0.0;
  bool refined = false;
};

struct SensingEstimate {
  std::vector<Detection> detections;  // sorted by descending peak power
  double noise_floor = 0.0;           // estimated mean noise power per bin
};

inline double infinite_sdnr() { return std::numeric_limits<double>::infinity(); }

/**
 * Empirical SDNR over the UE's resource set from the genie decomposition of
 * the received signal into signal, sensing-distortion and noise components.
 * With the cancellation flag the sensing term is dropped from the denominator.
 */
template <typename Scalar>
double ue_sdnr_empirical(const GridSignal<Scalar>& signal_part,
                         const GridSignal<Scalar>& sensing_part,
                         const GridSignal<Scalar>& noise_part,
                         const std::vector<IndexPair>& lambda_k,
                         bool cancellation = false) {
  if (lambda_k.empty()) throw AllocationError("ue_sdnr: empty UE resource set");
  double num = 0.0, den = 0.0;
  for (const auto& idx : lambda_k) {
    num += std::norm(signal_part.at(idx.m, idx.n));
    if (!cancellation) den += std::norm(sensing_part.at(idx.m, idx.n));
    den += std::norm(noise_part.at(idx.m, idx.n));
  }
  if (den == 0.0) return infinite_sdnr();
  return num / den;
}

/// Closed-form UE SDNR bound: kappa^2 sigma_k^2 / (kappa^2 sigma_sen^2 + sigma_z^2).
inline double ue_sdnr_bound(double kappa2, double sigma_k2, double sigma_sen2,
                            double sigma_z2, bool cancellation = false) {
  const double den = (cancellation ? 0.0 : kappa2 * sigma_sen2) + sigma_z2;
  if (den == 0.0) return infinite_sdnr();
  return kappa2 * sigma_k2 / den;
}

double achievable_rate(double sdnr, const GridSpec& grid);

/// Full per-UE report: empirical SDNR from the genie decomposition, the
/// closed-form bound, and the resulting rate.
template <typename Scalar>
UeReport ue_report(const GridSignal<Scalar>& signal_part,
                   const GridSignal<Scalar>& sensing_part,
                   const GridSignal<Scalar>& noise_part,
                   const std::vector<IndexPair>& lambda_k, double kappa2,
                   double sigma_k2, double sigma_sen2, double sigma_z2,
                   bool cancellation = false) {
  UeReport rep;
  rep.cancellation = cancellation;
  rep.sdnr_ft = ue_sdnr_empirical(signal_part, sensing_part, noise_part,
                                  lambda_k, cancellation);
  rep.sdnr_ft_bound =
      ue_sdnr_bound(kappa2, sigma_k2, sigma_sen2, sigma_z2, cancellation);
  rep.rate = achievable_rate(rep.sdnr_ft, signal_part.grid);
  return rep;
}

/// Maximum channel gain kappa^2 = sum_u sigma_u^2 zeta_u^2 for one UE.
inline double comm_channel_gain(const std::vector<PathSpec>& paths) {
  double kappa2 = 0.0;
  for (const auto& p : paths) kappa2 += p.variance * p.beam_gain * p.beam_gain;
  return kappa2;
}

/// Achievable rate with CP loss: C = T'/(T'+T_cp) log2(1 + sdnr).
inline double achievable_rate(double sdnr, const GridSpec& grid) {
  if (sdnr < 0.0) throw DomainError("achievable_rate: negative SDNR");
  if (std::isinf(sdnr)) return infinite_sdnr();
  return grid.cp_rate_loss() * std::log2(1.0 + sdnr);
}

/// BS-side DD transform of the received FT signal (unitary, so pure noise
/// keeps its per-bin variance while the sensing sinusoid gains MN at its bin).
template <typename Scalar>
GridSignal<Scalar> bs_dd_receive(const GridSignal<Scalar>& y_ft) {
  return ft_to_dd(y_ft);
}

/// Genie OFDM cancellation at the BS: subtracts the known comm component.
template <typename Scalar>
GridSignal<Scalar> cancel_ofdm(const GridSignal<Scalar>& y_ft,
                               const GridSignal<Scalar>& comm_component) {
  require_same_grid(y_ft.grid, comm_component.grid, "cancel_ofdm");
  GridSignal<Scalar> out = y_ft;
  out.data -= comm_component.data;
  return out;
}

struct PeriodogramOptions {
  int q_max = 1;
  int min_separation = 1;     // Chebyshev distance in bins between peaks
  double gamma_thr_db = 10.0; // detection threshold above the noise floor
  bool refine = false;        // 3-point parabolic sub-bin interpolation
};

namespace detail {

// Parabolic vertex offset from log-powers at (-1, 0, +1); clamped to half a
// bin and skipped when a side bin is empty.
inline double parabolic_offset(double pm, double p0, double pp) {
  if (pm <= 0.0 || pp <= 0.0 || p0 <= 0.0) return 0.0;
  const double lm = std::log(pm), l0 = std::log(p0), lp = std::log(pp);
  const double den = 2.0 * (2.0 * l0 - lm - lp);
  if (den <= 0.0) return 0.0;
  const double off = (lp - lm) / den;
  return std::clamp(off, -0.5, 0.5);
}

}  // namespace detail

/**
 * Peak extraction on |Y_dd|^2: circularly shifts by the known impulse
 * placement, estimates the noise floor as median(|Y|^2)/ln 2, and returns up
 * to q_max local maxima above the threshold, separated by at least
 * min_separation bins, converted to (tau, nu) via the grid resolutions.
 */
template <typename Scalar>
SensingEstimate periodogram_estimate(const GridSignal<Scalar>& y_dd, int l_i,
                                     int p_i, const PeriodogramOptions& opts) {
  require_domain(y_dd.domain, Domain::DD, "periodogram_estimate");
  if (opts.q_max < 1) throw ConfigError("periodogram_estimate: q_max must be >= 1");
  const GridSpec& g = y_dd.grid;
  const auto res = resolution_of(g);
  const int M = g.M, N = g.N;

  // Power map indexed by the shifted bins (l_tilde, p_tilde - wrapped).
  Eigen::MatrixXd power(M, N);
  for (int l = 0; l < M; ++l)
    for (int col = 0; col < N; ++col) {
      const int src_l = ((l + l_i) % M + M) % M;
      // Output column col carries Doppler bin p = col - N/2; its source in
      // the unshifted map is the storage column of p_i + p, i.e. (p_i + col) mod N.
      const int src_col = ((p_i + col) % N + N) % N;
      power(l, col) = std::norm(y_dd.data(src_l, src_col));
    }

  SensingEstimate est;
  std::vector<double> sorted(power.data(), power.data() + power.size());
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  est.noise_floor = median * 1.4426950408889634;  // median of Exp(mu) is mu ln 2
  const double threshold = est.noise_floor * db_to_linear(opts.gamma_thr_db);

  struct Peak {
    int l, col;
    double p;
  };
  std::vector<Peak> peaks;
  for (int l = 0; l < M; ++l)
    for (int col = 0; col < N; ++col) {
      const double p = power(l, col);
      if (p <= threshold || p <= 0.0) continue;
      const int lm = (l + M - 1) % M, lp = (l + 1) % M;
      const int cm = (col + N - 1) % N, cp = (col + 1) % N;
      if (p >= power(lm, col) && p >= power(lp, col) && p >= power(l, cm) &&
          p >= power(l, cp))
        peaks.push_back({l, col, p});
    }
  std::sort(peaks.begin(), peaks.end(),
            [](const Peak& a, const Peak& b) { return a.p > b.p; });

  auto circ_dist = [](int a, int b, int K) {
    const int d = std::abs(a - b) % K;
    return std::min(d, K - d);
  };
  std::vector<Peak> kept;
  for (const auto& peak : peaks) {
    bool clear = true;
    for (const auto& other : kept)
      if (circ_dist(peak.l, other.l, M) < opts.min_separation &&
          circ_dist(peak.col, other.col, N) < opts.min_separation) {
        clear = false;
        break;
      }
    if (clear) kept.push_back(peak);
    if (static_cast<int>(kept.size()) >= opts.q_max) break;
  }

  for (const auto& peak : kept) {
    double l_hat = peak.l;
    double p_hat = g.n_of_col(peak.col);
    bool refined = false;
    if (opts.refine) {
      const int lm = (peak.l + M - 1) % M, lp = (peak.l + 1) % M;
      const int cm = (peak.col + N - 1) % N, cp = (peak.col + 1) % N;
      const double dl = detail::parabolic_offset(power(lm, peak.col), peak.p,
                                                 power(lp, peak.col));
      const double dp = detail::parabolic_offset(power(peak.l, cm), peak.p,
                                                 power(peak.l, cp));
      l_hat += dl;
      p_hat += dp;
      refined = dl != 0.0 || dp != 0.0;
    }
    est.detections.push_back(
        {l_hat * res.delta_tau, p_hat * res.delta_nu, peak.p, refined});
  }
  return est;
}

/**
 * Coupling factor between targets q and j:
 *   chi = |D_N(dnu_bins) D_M(dtau_bins)|^2 / (MN)^2, in [0, 1],
 * equal to 1 only for coincident delay-Doppler and 0 at integer-bin Doppler
 * (or delay) offsets.
 */
inline double coupling_chi(const GridSpec& grid, double dtau_s, double dnu_hz) {
  const auto res = resolution_of(grid);
  const double d = dirichlet_kernel(dtau_s / res.delta_tau, grid.M) *
                   dirichlet_kernel(dnu_hz / res.delta_nu, grid.N);
  const double chi = d * d / (static_cast<double>(grid.M) * grid.M *
                              static_cast<double>(grid.N) * grid.N);
  return chi;
}

/// Per-target sensing SDNR (expected value form) and its closed-form bound.
struct SensingSdnr {
  double sdnr = 0.0;
  double bound = 0.0;
  double chi_row_sum = 0.0;  // sum over j != q of chi_{q,j}
};

/**
 * DD-domain sensing SDNR for each target. Numerator: expected peak power
 * kappa_q^2 (sigma_sen^DD)^2 attenuated by the fractional-bin Dirichlet
 * loss. Denominator: inter-target leakage sum_{j!=q} kappa_j^2 chi_{q,j}
 * (sigma_sen^DD)^2 + comm disturbance kappa_sen^2 (sigma_com^DD)^2 + L sigma_z^2.
 * The bound replaces the attenuation by its on-grid maximum of 1.
 */
template <typename Scalar = double>
std::vector<SensingSdnr> sensing_sdnr(const std::vector<TargetSpec>& targets,
                                      const PowerPlan<Scalar>& plan,
                                      const Allocation& alloc,
                                      const GridSpec& grid,
                                      const NoiseSpec& noise,
                                      bool ofdm_cancelled = false) {
  if (targets.empty()) throw SceneError("sensing_sdnr: empty target list");
  const auto res = resolution_of(grid);
  const double sigma_sen_dd2 = static_cast<double>(plan.sigma_sen_dd_sq(grid));
  const double sigma_com_dd2 =
      ofdm_cancelled ? 0.0 : static_cast<double>(plan.sigma_com_dd_sq(alloc, grid));

  std::vector<double> kappa2(targets.size());
  double kappa_sen2 = 0.0;
  for (std::size_t q = 0; q < targets.size(); ++q) {
    const double var = radar_target_variance(targets[q].rcs, grid.f0, targets[q].range);
    kappa2[q] = var * targets[q].beam_gain * targets[q].beam_gain;
    kappa_sen2 += kappa2[q];
  }

  std::vector<SensingSdnr> out(targets.size());
  for (std::size_t q = 0; q < targets.size(); ++q) {
    // Dirichlet attenuation of target q's peak at its rounded bin.
    const double l_true = targets[q].delay() / res.delta_tau;
    const double p_true = targets[q].doppler(grid.f0) / res.delta_nu;
    const double frac_l = (l_true - std::round(l_true)) * res.delta_tau;
    const double frac_p = (p_true - std::round(p_true)) * res.delta_nu;
    const double self_atten = coupling_chi(grid, frac_l, frac_p);

    double leakage = 0.0, chi_sum = 0.0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      if (j == q) continue;
      const double chi = coupling_chi(
          grid, targets[q].delay() - targets[j].delay(),
          targets[q].doppler(grid.f0) - targets[j].doppler(grid.f0));
      chi_sum += chi;
      leakage += kappa2[j] * chi * sigma_sen_dd2;
    }
    const double den =
        leakage + kappa_sen2 * sigma_com_dd2 + noise.sigma_z2 * noise.L;
    out[q].chi_row_sum = chi_sum;
    out[q].sdnr = den == 0.0 ? infinite_sdnr()
                             : kappa2[q] * sigma_sen_dd2 * self_atten / den;
    out[q].bound =
        den == 0.0 ? infinite_sdnr() : kappa2[q] * sigma_sen_dd2 / den;
  }
  return out;
}

}  // namespace isac
