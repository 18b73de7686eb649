#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "isac/constants.hpp"
#include "isac/errors.hpp"
#include "isac/grid.hpp"
#include "isac/transform.hpp"

namespace isac {

enum class WaveformKind { Ofdm, DualDomain, Otfs };

inline const char* waveform_name(WaveformKind k) {
  switch (k) {
    case WaveformKind::Ofdm: return "ofdm";
    case WaveformKind::DualDomain: return "dual-domain";
    default: return "otfs";
  }
}

// OTFS has no CP, so its Doppler response is built on T' instead of T.
inline double doppler_period(WaveformKind kind, const GridSpec& g) {
  return kind == WaveformKind::Otfs ? g.t_prime : g.symbol_duration();
}

/// |chi(tau, nu)| sampled on a rectangular (tau, nu) grid.
struct AmbiguityMap {
  Eigen::MatrixXd values;  // rows follow tau_axis, cols follow nu_axis
  Eigen::VectorXd tau_axis;
  Eigen::VectorXd nu_axis;
  WaveformKind kind = WaveformKind::DualDomain;
};

/**
 * Discrete-aperture ambiguity function
 *   chi(tau, nu) = sum_{m,n} P(m,n) e^{-j 2 pi (m delta_f tau + n T_s nu)},
 * with P the per-resource power map (FT layout) and T_s the waveform's
 * symbol period. Evaluated exactly via two phase-matrix products. tau must
 * lie within one delay period [-T', T'], nu within [-1/T_s, 1/T_s].
 */
inline AmbiguityMap ambiguity(const Eigen::MatrixXd& power, const GridSpec& grid,
                              WaveformKind kind, const Eigen::VectorXd& tau_axis,
                              const Eigen::VectorXd& nu_axis) {
  if (power.rows() != grid.M || power.cols() != grid.N)
    throw DomainError("ambiguity: power map must be M x N");
  const double t_s = doppler_period(kind, grid);
  for (int i = 0; i < tau_axis.size(); ++i)
    if (std::abs(tau_axis(i)) > grid.t_prime * (1.0 + 1e-12))
      throw DomainError("ambiguity: tau outside one delay period");
  for (int i = 0; i < nu_axis.size(); ++i)
    if (std::abs(nu_axis(i)) > 1.0 / t_s * (1.0 + 1e-12))
      throw DomainError("ambiguity: nu outside one Doppler period");

  using Cplx = std::complex<double>;
  Eigen::MatrixXcd e_tau(grid.M, tau_axis.size());
  for (int row = 0; row < grid.M; ++row) {
    const double m = grid.m_of_row(row);
    for (int a = 0; a < tau_axis.size(); ++a) {
      const double ang = -2.0 * pi * m * grid.delta_f * tau_axis(a);
      e_tau(row, a) = Cplx(std::cos(ang), std::sin(ang));
    }
  }
  Eigen::MatrixXcd e_nu(grid.N, nu_axis.size());
  for (int col = 0; col < grid.N; ++col) {
    const double n = grid.n_of_col(col);
    for (int b = 0; b < nu_axis.size(); ++b) {
      const double ang = -2.0 * pi * n * t_s * nu_axis(b);
      e_nu(col, b) = Cplx(std::cos(ang), std::sin(ang));
    }
  }
  AmbiguityMap map;
  map.kind = kind;
  map.tau_axis = tau_axis;
  map.nu_axis = nu_axis;
  const Eigen::MatrixXcd chi =
      e_tau.transpose() * power.cast<Cplx>() * e_nu;
  map.values = chi.cwiseAbs();
  return map;
}

/**
 * Fast path for bin-aligned evaluation grids: tau_a = a T'/(os M) over
 * [0, T'), nu_b = (b/(os N) - 1/2)/T_s over [-1/(2 T_s), 1/(2 T_s)),
 * computed with a zero-padded 2D FFT. Requires power-of-two M, N, os.
 */
inline AmbiguityMap ambiguity_aligned(const Eigen::MatrixXd& power,
                                      const GridSpec& grid, WaveformKind kind,
                                      int oversample) {
  if (!detail::is_pow2(grid.M) || !detail::is_pow2(grid.N) ||
      !detail::is_pow2(oversample))
    throw DomainError("ambiguity_aligned: sizes must be powers of two");
  using Cplx = std::complex<double>;
  const int mt = grid.M * oversample, nt = grid.N * oversample;
  const double t_s = doppler_period(kind, grid);

  Eigen::MatrixXcd padded = Eigen::MatrixXcd::Zero(mt, nt);
  for (int row = 0; row < grid.M; ++row)
    for (int col = 0; col < grid.N; ++col)
      padded(row, col) = (col & 1) ? -power(row, col) : power(row, col);
  for (int col = 0; col < nt; ++col)
    detail::fft_radix2(padded.col(col).data(), mt, -1);
  std::vector<Cplx> rowbuf(static_cast<std::size_t>(nt));
  for (int row = 0; row < mt; ++row) {
    for (int col = 0; col < nt; ++col) rowbuf[static_cast<std::size_t>(col)] = padded(row, col);
    detail::fft_radix2(rowbuf.data(), nt, -1);
    for (int col = 0; col < nt; ++col) padded(row, col) = rowbuf[static_cast<std::size_t>(col)];
  }

  AmbiguityMap map;
  map.kind = kind;
  map.tau_axis.resize(mt);
  for (int a = 0; a < mt; ++a)
    map.tau_axis(a) = static_cast<double>(a) * grid.t_prime / mt;
  map.nu_axis.resize(nt);
  for (int b = 0; b < nt; ++b)
    map.nu_axis(b) = (static_cast<double>(b) / nt - 0.5) / t_s;
  // The signed-index and half-period offsets only contribute unit-modulus
  // phases, which |chi| discards.
  map.values = padded.cwiseAbs();
  return map;
}

enum class MterVariant { SqrtRatio, EnergyRatio };

namespace detail {

// Composite Simpson weights on an odd-length uniform grid.
inline Eigen::VectorXd simpson_weights(int count, double step) {
  if (count < 3 || count % 2 == 0)
    throw ResolutionError("simpson_weights: need an odd sample count >= 3");
  Eigen::VectorXd w(count);
  w(0) = w(count - 1) = 1.0;
  for (int i = 1; i < count - 1; ++i) w(i) = (i % 2 == 1) ? 4.0 : 2.0;
  return w * (step / 3.0);
}

}  // namespace detail

/**
 * Main-lobe-to-total-energy ratio of the ambiguity function.
 *
 * E_main integrates |chi|^2 over the bin box |tau| <= 1/(2 M delta_f),
 * |nu| <= 1/(2 N T) (composite Simpson, box_samples per axis); the total is
 * the exact one-period energy |P|_F^2 / (delta_f T_s). SqrtRatio returns
 * sqrt(E_main/E_total) (the form the headline figures use), EnergyRatio the
 * plain energy quotient.
 */
inline double mter_waveform(const Eigen::MatrixXd& power, const GridSpec& grid,
                            WaveformKind kind,
                            MterVariant variant = MterVariant::SqrtRatio,
                            int box_samples = 65) {
  if (box_samples < 17 || box_samples % 2 == 0)
    throw ResolutionError("mter_waveform: box_samples must be odd and >= 17");
  const auto res = resolution_of(grid);
  const double t_s = doppler_period(kind, grid);

  Eigen::VectorXd tau_axis(box_samples), nu_axis(box_samples);
  const double tau_half = 0.5 * res.delta_tau, nu_half = 0.5 * res.delta_nu;
  for (int i = 0; i < box_samples; ++i) {
    const double f = static_cast<double>(i) / (box_samples - 1);
    tau_axis(i) = -tau_half + 2.0 * tau_half * f;
    nu_axis(i) = -nu_half + 2.0 * nu_half * f;
  }
  const auto map = ambiguity(power, grid, kind, tau_axis, nu_axis);

  const auto w_tau =
      detail::simpson_weights(box_samples, 2.0 * tau_half / (box_samples - 1));
  const auto w_nu =
      detail::simpson_weights(box_samples, 2.0 * nu_half / (box_samples - 1));
  const double e_main =
      w_tau.transpose() * map.values.array().square().matrix() * w_nu;

  const double e_total = power.squaredNorm() / (grid.delta_f * t_s);
  const double ratio = e_main / e_total;
  return variant == MterVariant::SqrtRatio ? std::sqrt(ratio) : ratio;
}

/**
 * Spec-level MTER on an externally sampled map covering the fundamental
 * region tau in [-T'/2, T'/2] (or [0, T']), nu in [-1/(2T_s), 1/(2T_s)].
 * Both integrals are numerical (trapezoid on the map lattice); raises
 * ResolutionError when fewer than 8 map samples per axis fall inside the
 * main-lobe box.
 */
inline double mter_from_map(const AmbiguityMap& map, const GridSpec& grid,
                            MterVariant variant = MterVariant::SqrtRatio) {
  const auto res = resolution_of(grid);
  const double t_s = doppler_period(map.kind, grid);
  const auto& tau = map.tau_axis;
  const auto& nu = map.nu_axis;
  if (tau.size() < 2 || nu.size() < 2)
    throw ResolutionError("mter_from_map: degenerate map");
  const double tau_span = tau(tau.size() - 1) - tau(0);
  const double nu_span = nu(nu.size() - 1) - nu(0);
  if (tau_span < grid.t_prime * (1.0 - 1e-9) ||
      nu_span < 1.0 / t_s * (1.0 - 1e-9))
    throw ResolutionError("mter_from_map: map does not cover the fundamental region");

  int tau_in_box = 0, nu_in_box = 0;
  for (int i = 0; i < tau.size(); ++i) {
    double t = tau(i);
    // Fold into [-T'/2, T'/2] so [0, T'] maps work too.
    if (t > grid.t_prime / 2.0) t -= grid.t_prime;
    if (std::abs(t) <= 0.5 * res.delta_tau * (1.0 + 1e-12)) ++tau_in_box;
  }
  for (int i = 0; i < nu.size(); ++i)
    if (std::abs(nu(i)) <= 0.5 * res.delta_nu * (1.0 + 1e-12)) ++nu_in_box;
  if (tau_in_box < 8 || nu_in_box < 8)
    throw ResolutionError("mter_from_map: fewer than 8 samples per main-lobe axis");

  // Trapezoid weights along each axis; box indicator selects E_main terms.
  auto trapezoid = [](const Eigen::VectorXd& axis) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(axis.size());
    for (int i = 0; i + 1 < axis.size(); ++i) {
      const double h = axis(i + 1) - axis(i);
      w(i) += 0.5 * h;
      w(i + 1) += 0.5 * h;
    }
    return w;
  };
  const auto w_tau = trapezoid(tau);
  const auto w_nu = trapezoid(nu);
  double e_total = 0.0, e_main = 0.0;
  for (int a = 0; a < tau.size(); ++a) {
    double t = tau(a);
    if (t > grid.t_prime / 2.0) t -= grid.t_prime;
    const bool tau_in = std::abs(t) <= 0.5 * res.delta_tau * (1.0 + 1e-12);
    for (int b = 0; b < nu.size(); ++b) {
      const double cell = w_tau(a) * w_nu(b) * map.values(a, b) * map.values(a, b);
      e_total += cell;
      if (tau_in && std::abs(nu(b)) <= 0.5 * res.delta_nu * (1.0 + 1e-12))
        e_main += cell;
    }
  }
  const double ratio = e_main / e_total;
  return variant == MterVariant::SqrtRatio ? std::sqrt(ratio) : ratio;
}

// ---------------------------------------------------------------------------
// Fisher information and CRBs for two targets observed through the waveform's
// power map (decoupled delay/Doppler blocks; white or dual-domain colored
// noise).
// ---------------------------------------------------------------------------

struct NoiseModelSpec {
  enum class Kind { White, DualDomainColored };
  Kind kind = Kind::White;
  double sigma_z2 = 1.0;
  Eigen::MatrixXd p_com;  // per-bin comm power for the colored model

  static NoiseModelSpec white(double sigma_z2) {
    NoiseModelSpec n;
    n.kind = Kind::White;
    n.sigma_z2 = sigma_z2;
    return n;
  }
  static NoiseModelSpec colored(double sigma_z2, Eigen::MatrixXd p_com) {
    NoiseModelSpec n;
    n.kind = Kind::DualDomainColored;
    n.sigma_z2 = sigma_z2;
    n.p_com = std::move(p_com);
    return n;
  }
};

struct FimReport {
  Eigen::Matrix2d i_tau = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d i_nu = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d crb_tau = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d crb_nu = Eigen::Matrix2d::Zero();
  bool singular_tau = false;
  bool singular_nu = false;
  NoiseModelSpec::Kind noise_kind = NoiseModelSpec::Kind::White;
};

namespace detail {

// Inverts a 2x2 FIM block, degrading gracefully: a zero second diagonal
// (absent second target) yields the single-target bound plus an +inf slot;
// a genuinely singular block yields +inf everywhere and sets the flag.
inline void invert_fim_block(const Eigen::Matrix2d& info, Eigen::Matrix2d& crb,
                             bool& singular) {
  const double inf = std::numeric_limits<double>::infinity();
  crb.setConstant(inf);
  singular = false;
  const double a = info(0, 0), d = info(1, 1), b = info(0, 1);
  if (d == 0.0 || a == 0.0) {
    if (a > 0.0) crb(0, 0) = 1.0 / a;
    if (d > 0.0) crb(1, 1) = 1.0 / d;
    singular = (a == 0.0 && d == 0.0);
    return;
  }
  const double det = a * d - b * b;
  if (det <= 1e-12 * a * d) {
    singular = true;
    return;
  }
  crb(0, 0) = d / det;
  crb(1, 1) = a / det;
  crb(0, 1) = crb(1, 0) = -b / det;
}

}  // namespace detail

/**
 * Decoupled delay/Doppler Fisher information for two targets with fixed
 * complex amplitudes beta1, beta2 on the aperture described by `power`.
 * The diagonal terms weight the power map by 4 pi^2 delta_f^2 m^2 (delay)
 * and 4 pi^2 T^2 n^2 (Doppler); cross terms carry the relative phase of the
 * two returns. CRBs are the 2x2 block inverses.
 */
inline FimReport fim_two_targets(const Eigen::MatrixXd& power,
                                 const GridSpec& grid,
                                 std::complex<double> beta1,
                                 std::complex<double> beta2, double tau1,
                                 double tau2, double nu1, double nu2,
                                 const NoiseModelSpec& noise) {
  if (power.rows() != grid.M || power.cols() != grid.N)
    throw DomainError("fim_two_targets: power map must be M x N");
  if ((power.array() < 0.0).any())
    throw DomainError("fim_two_targets: negative power entries");
  FimReport rep;
  rep.noise_kind = noise.kind;
  const double T = grid.symbol_duration();
  const double b1 = std::norm(beta1), b2 = std::norm(beta2);
  const std::complex<double> cross_amp = std::conj(beta1) * beta2;

  const bool colored = noise.kind == NoiseModelSpec::Kind::DualDomainColored;
  if (colored && (noise.p_com.rows() != grid.M || noise.p_com.cols() != grid.N))
    throw DomainError("fim_two_targets: colored model needs an M x N p_com");

  double s_mm = 0.0, s_nn = 0.0;
  std::complex<double> s_mm_phase(0.0, 0.0), s_nn_phase(0.0, 0.0);
  for (int col = 0; col < grid.N; ++col) {
    const double n = grid.n_of_col(col);
    for (int row = 0; row < grid.M; ++row) {
      const double p = power(row, col);
      if (p == 0.0) continue;
      const double m = grid.m_of_row(row);
      double rz = noise.sigma_z2;
      if (colored) rz += (b1 + b2) * noise.p_com(row, col);
      const double w = p / rz;
      // Phase of target 2's return relative to target 1's at this bin.
      const double ang =
          2.0 * pi * (n * T * (nu2 - nu1) - m * grid.delta_f * (tau2 - tau1));
      const std::complex<double> phase(std::cos(ang), std::sin(ang));
      s_mm += m * m * w;
      s_nn += n * n * w;
      s_mm_phase += m * m * w * phase;
      s_nn_phase += n * n * w * phase;
    }
  }
  const double k_tau = 8.0 * pi * pi * grid.delta_f * grid.delta_f;
  const double k_nu = 8.0 * pi * pi * T * T;
  rep.i_tau(0, 0) = k_tau * b1 * s_mm;
  rep.i_tau(1, 1) = k_tau * b2 * s_mm;
  rep.i_tau(0, 1) = rep.i_tau(1, 0) = k_tau * (cross_amp * s_mm_phase).real();
  rep.i_nu(0, 0) = k_nu * b1 * s_nn;
  rep.i_nu(1, 1) = k_nu * b2 * s_nn;
  rep.i_nu(0, 1) = rep.i_nu(1, 0) = k_nu * (cross_amp * s_nn_phase).real();

  detail::invert_fim_block(rep.i_tau, rep.crb_tau, rep.singular_tau);
  detail::invert_fim_block(rep.i_nu, rep.crb_nu, rep.singular_nu);
  return rep;
}

/**
 * Full joint 4x4 Fisher information over (tau1, tau2, nu1, nu2) — the
 * flagged extension beyond the decoupled blocks; validated only against the
 * finite-difference oracle.
 */
inline Eigen::Matrix4d fim_joint4(const Eigen::MatrixXd& power,
                                  const GridSpec& grid,
                                  std::complex<double> beta1,
                                  std::complex<double> beta2, double tau1,
                                  double tau2, double nu1, double nu2,
                                  const NoiseModelSpec& noise) {
  using Cplx = std::complex<double>;
  const double T = grid.symbol_duration();
  const bool colored = noise.kind == NoiseModelSpec::Kind::DualDomainColored;
  const double b1 = std::norm(beta1), b2 = std::norm(beta2);
  const Cplx betas[2] = {beta1, beta2};
  const double taus[2] = {tau1, tau2};
  const double nus[2] = {nu1, nu2};

  Eigen::Matrix4d info = Eigen::Matrix4d::Zero();
  for (int col = 0; col < grid.N; ++col) {
    const double n = grid.n_of_col(col);
    for (int row = 0; row < grid.M; ++row) {
      const double p = power(row, col);
      if (p == 0.0) continue;
      const double m = grid.m_of_row(row);
      double rz = noise.sigma_z2;
      if (colored) rz += (b1 + b2) * noise.p_com(row, col);
      const double w = p / rz;
      Cplx dphase[2];  // relative phase e^{j2pi(nT nu_q - m df tau_q)}
      for (int q = 0; q < 2; ++q) {
        const double ang =
            2.0 * pi * (n * T * nus[q] - m * grid.delta_f * taus[q]);
        dphase[q] = Cplx(std::cos(ang), std::sin(ang));
      }
      const double dm = -2.0 * pi * m * grid.delta_f;  // d/dtau phase rate
      const double dn = 2.0 * pi * n * T;              // d/dnu phase rate
      // Parameter order: tau1, tau2, nu1, nu2.
      const double rates[4] = {dm, dm, dn, dn};
      const int owner[4] = {0, 1, 0, 1};
      for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
          const Cplx gi = betas[owner[i]] * Cplx(0.0, rates[i]) * dphase[owner[i]];
          const Cplx gj = betas[owner[j]] * Cplx(0.0, rates[j]) * dphase[owner[j]];
          info(i, j) += 2.0 * w * (std::conj(gi) * gj).real();
        }
    }
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) info(i, j) = info(j, i);
  return info;
}

/// Flat power map helper: every bin carries per_bin watts.
inline Eigen::MatrixXd flat_power(const GridSpec& grid, double per_bin) {
  return Eigen::MatrixXd::Constant(grid.M, grid.N, per_bin);
}

/// Centered frequency band of width_rows subcarriers, all N symbols.
inline Eigen::MatrixXd banded_power(const GridSpec& grid, int width_rows,
                                    double per_bin) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(grid.M, grid.N);
  const int lo = grid.row_of(-(width_rows / 2));
  for (int i = 0; i < width_rows; ++i) p.row(lo + i).setConstant(per_bin);
  return p;
}

/// Single-target delay information for a power map (white or colored noise).
inline double delay_fim_single(const Eigen::MatrixXd& power, const GridSpec& grid,
                               double beta_abs2, const NoiseModelSpec& noise) {
  const auto rep = fim_two_targets(power, grid, std::sqrt(beta_abs2), 0.0, 0.0,
                                   0.0, 0.0, 0.0, noise);
  return rep.i_tau(0, 0);
}

// ---------------------------------------------------------------------------
// Figure-style sweeps: root-CRB ratio OFDM / dual-domain on delay.
// ---------------------------------------------------------------------------

struct CrbSweepPoint {
  double mcom_frac = 0.0;
  double eta = 1.0;
  double separation_bins = 0.0;  // 0 for the single-target sweep
  double ratio_db = 0.0;         // 5 log10(CRB_ofdm / CRB_dual)
};

struct CrbSweepSetup {
  double sensing_ratio = 1e-3;  // r = (sigma_sen / sigma_com)^2 per bin
  double p_tot = 20.0;          // total emitted power [W]
  double sigma_z2 = 1e-12;      // per-bin noise power [W]
  std::complex<double> beta1{1e-6, 0.0};
  std::complex<double> beta2{0.0, 0.0};
  AllocationScheme scheme = AllocationScheme::ContiguousBlocks;
};

namespace detail {

struct SweepPowers {
  Eigen::MatrixXd p_ofdm;      // OFDM waveform power map (all of p_tot)
  Eigen::MatrixXd p_dual_com;  // dual-domain comm share (for the colored model)
  double sigma_sen2 = 0.0;     // dual-domain flat sensing power per bin
};

// Equal-P_tot power construction for one (mcom_frac, eta) point. Per-bin
// comm amplitude follows sigma_com^2 = P_com / (eta M_com); the sensing
// amplitude is slaved at sigma_sen^2 = r sigma_com^2 and the split satisfies
// P_com + M sigma_sen^2 = P_tot exactly. ContiguousBlocks concentrates the
// allocation into a centered band of round(eta M_com) rows; RandomUniform is
// represented by its expectation, eta-thinned over the full M_com band.
inline SweepPowers sweep_powers(const GridSpec& grid, double mcom_frac,
                                double eta, const CrbSweepSetup& s) {
  const int m_com = std::max(1, static_cast<int>(std::llround(mcom_frac * grid.M)));
  SweepPowers out;
  if (s.scheme == AllocationScheme::ContiguousBlocks) {
    const int width = std::max(1, static_cast<int>(std::llround(eta * m_com)));
    out.p_ofdm = banded_power(grid, width, s.p_tot / width);
    const double p_com = s.p_tot / (1.0 + s.sensing_ratio * grid.M / width);
    out.p_dual_com = banded_power(grid, width, p_com / width);
    out.sigma_sen2 = s.sensing_ratio * p_com / width;
  } else {
    const double eff = eta * m_com;  // expected occupied rows
    out.p_ofdm = banded_power(grid, m_com, s.p_tot / m_com);
    const double p_com = s.p_tot / (1.0 + s.sensing_ratio * grid.M / eff);
    out.p_dual_com = banded_power(grid, m_com, p_com / m_com);
    out.sigma_sen2 = s.sensing_ratio * p_com / eff;
  }
  return out;
}

}  // namespace detail

/**
 * Single-target root-CRB ratio OFDM/dual-domain versus (M_com/M, eta) at
 * equal total power. The OFDM radar works against white noise; the
 * dual-domain sensing signal sees the superposed comm power as colored
 * interference.
 */
inline std::vector<CrbSweepPoint> crb_ratio_eta_sweep(
    const GridSpec& grid, const std::vector<double>& mcom_fracs,
    const std::vector<double>& etas, const CrbSweepSetup& setup) {
  std::vector<CrbSweepPoint> points;
  const double b2 = std::norm(setup.beta1);
  for (double frac : mcom_fracs) {
    if (frac <= 0.0 || frac > 1.0)
      throw ConfigError("crb_ratio_eta_sweep: M_com/M must be in (0, 1]");
    for (double eta : etas) {
      if (eta <= 0.0 || eta > 1.0)
        throw ConfigError("crb_ratio_eta_sweep: eta must be in (0, 1]");
      const auto pw = detail::sweep_powers(grid, frac, eta, setup);
      const double i_ofdm = delay_fim_single(
          pw.p_ofdm, grid, b2, NoiseModelSpec::white(setup.sigma_z2));
      const double i_dual = delay_fim_single(
          flat_power(grid, pw.sigma_sen2), grid, b2,
          NoiseModelSpec::colored(setup.sigma_z2, pw.p_dual_com));
      CrbSweepPoint pt;
      pt.mcom_frac = frac;
      pt.eta = eta;
      pt.ratio_db = 5.0 * std::log10(i_dual / i_ofdm);
      points.push_back(pt);
    }
  }
  return points;
}

/**
 * Two-target root-CRB ratio on delay (CRB of tau_1) versus the normalized
 * separation (tau2 - tau1)/delta_tau, at full hull occupation (eta = 1) and
 * equal total power; beta2 = beta1 and equal Dopplers unless configured
 * otherwise by the caller via `setup`.
 */
inline std::vector<CrbSweepPoint> crb_ratio_two_target_sweep(
    const GridSpec& grid, const std::vector<double>& mcom_fracs,
    const std::vector<double>& separations_bins, const CrbSweepSetup& setup) {
  std::vector<CrbSweepPoint> points;
  const auto res = resolution_of(grid);
  for (double frac : mcom_fracs) {
    const auto pw = detail::sweep_powers(grid, frac, 1.0, setup);
    for (double sep : separations_bins) {
      if (sep == 0.0)
        throw ConfigError("crb_ratio_two_target_sweep: zero separation is singular");
      const double tau2 = sep * res.delta_tau;
      const auto rep_ofdm = fim_two_targets(
          pw.p_ofdm, grid, setup.beta1, setup.beta2, 0.0, tau2, 0.0, 0.0,
          NoiseModelSpec::white(setup.sigma_z2));
      const auto rep_dual = fim_two_targets(
          flat_power(grid, pw.sigma_sen2), grid, setup.beta1, setup.beta2, 0.0,
          tau2, 0.0, 0.0,
          NoiseModelSpec::colored(setup.sigma_z2, pw.p_dual_com));
      CrbSweepPoint pt;
      pt.mcom_frac = frac;
      pt.eta = 1.0;
      pt.separation_bins = sep;
      pt.ratio_db =
          5.0 * std::log10(rep_ofdm.crb_tau(0, 0) / rep_dual.crb_tau(0, 0));
      points.push_back(pt);
    }
  }
  return points;
}

}  // namespace isac
