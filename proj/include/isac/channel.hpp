#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "isac/constants.hpp"
#include "isac/errors.hpp"
#include "isac/grid.hpp"
#include "isac/rng.hpp"
#include "isac/signal.hpp"

namespace isac {

/// One propagation path of a UE's multipath channel.
struct PathSpec {
  double variance = 0.0;   // mean-square amplitude E|alpha|^2
  double delay = 0.0;      // tau [s]
  double doppler = 0.0;    // nu [Hz]
  double beam_gain = 1.0;  // zeta, multiplies the amplitude
};

/// A point target seen by the monostatic sensing receiver.
struct TargetSpec {
  double rcs = 1.0;        // Gamma [m^2]
  double range = 1.0;      // R [m]
  double velocity = 0.0;   // V [m/s], positive towards the BS
  double beam_gain = 1.0;  // zeta_q

  double delay() const { return 2.0 * range / speed_of_light; }
  double doppler(double f0) const { return 2.0 * f0 * velocity / speed_of_light; }
};

/// Receiver noise description. The BS side sees L sigma_z^2 per bin after Rx BF.
struct NoiseSpec {
  double sigma_z2 = 0.0;  // per-bin noise power at the UE [W]
  int L = 1;              // antenna count
};

enum class RxSide { UE, BS };

/// Spectral weighting G(m delta_f) applied along frequency.
enum class PulseShape { DirichletFlat, RectInDelay, RaisedCosine };

inline double pulse_spectrum(PulseShape shape, int m, const GridSpec& grid,
                             double rolloff = 0.25) {
  switch (shape) {
    case PulseShape::DirichletFlat:
      return 1.0;
    case PulseShape::RectInDelay: {
      // g(t) = rect(t / delta_tau) has G(f) = sinc(f / (M delta_f)).
      const double x = static_cast<double>(m) / grid.M;
      return x == 0.0 ? 1.0 : std::sin(pi * x) / (pi * x);
    }
    case PulseShape::RaisedCosine: {
      const double half = 0.5 * grid.M;
      const double f = std::abs(static_cast<double>(m)) / half;  // 0..1 at band edge
      const double flat = 1.0 - rolloff;
      if (f <= flat) return 1.0;
      if (f >= 1.0 + rolloff) return 0.0;
      return 0.5 * (1.0 + std::cos(pi * (f - flat) / (2.0 * rolloff)));
    }
  }
  return 1.0;
}

// Link-budget closures. The free-space one-way power gain and the radar
// equation two-way gain; the noise floor is thermal kT delta_f times the
// receiver noise figure.
inline double friis_path_variance(double f0, double range) {
  const double lambda = speed_of_light / f0;
  const double x = lambda / (4.0 * pi * range);
  return x * x;
}

inline double radar_target_variance(double rcs, double f0, double range) {
  const double c = speed_of_light;
  return rcs * c * c /
         (std::pow(4.0 * pi, 3) * f0 * f0 * std::pow(range, 4));
}

inline double thermal_noise_power(double delta_f, double noise_figure_db) {
  return boltzmann_k * reference_temperature_k * delta_f *
         db_to_linear(noise_figure_db);
}

/**
 * Periodic Dirichlet kernel D_K(t) = sin(pi t) / sin(pi t / K). Integer t
 * is snapped (1e-9-bin tolerance) so that bin-aligned offsets give exact
 * zeros and the peaks give exactly +-K; delay-Doppler coupling factors and
 * DD channel entries then vanish identically where the theory says they do.
 */
inline double dirichlet_kernel(double t, int K) {
  const long long ti = std::llround(t);
  if (std::abs(t - ti) < 1e-9) {
    if (ti % K != 0) return 0.0;
    const long long k = ti / K;
    return ((k % 2 != 0) && (K % 2 == 0)) ? -static_cast<double>(K)
                                          : static_cast<double>(K);
  }
  return std::sin(pi * t) / std::sin(pi * t / K);
}

namespace detail {

// H += amp * zeta * outer(exp(-j2pi m delta_f tau) * G(m), exp(j2pi nu n T))
template <typename Scalar>
void accumulate_path(typename GridSignal<Scalar>::Matrix& h,
                     const GridSpec& grid, std::complex<Scalar> amp,
                     Scalar zeta, Scalar tau, Scalar nu, PulseShape shape) {
  using Cplx = std::complex<Scalar>;
  Eigen::Vector<Cplx, Eigen::Dynamic> freq(grid.M), time(grid.N);
  for (int row = 0; row < grid.M; ++row) {
    const int m = grid.m_of_row(row);
    const Scalar ang = Scalar(-2) * static_cast<Scalar>(pi) * m *
                       static_cast<Scalar>(grid.delta_f) * tau;
    freq(row) = Cplx(std::cos(ang), std::sin(ang)) *
                static_cast<Scalar>(pulse_spectrum(shape, m, grid));
  }
  const Scalar T = static_cast<Scalar>(grid.symbol_duration());
  for (int col = 0; col < grid.N; ++col) {
    const int n = grid.n_of_col(col);
    const Scalar ang = Scalar(2) * static_cast<Scalar>(pi) * nu * n * T;
    time(col) = Cplx(std::cos(ang), std::sin(ang));
  }
  h.noalias() += (amp * zeta) * freq * time.transpose();
}

}  // namespace detail

/**
 * UE communication channel in the FT domain:
 *   H(m, n) = sum_u alpha_u e^{j2pi(nu_u n T - m delta_f tau_u)} G(m df) zeta_u
 * with alpha_u drawn CN(0, variance_u) fresh per call.
 */
template <typename Scalar = double>
GridSignal<Scalar> comm_channel_ft(const GridSpec& grid,
                                   const std::vector<PathSpec>& paths, Rng& rng,
                                   PulseShape shape = PulseShape::DirichletFlat) {
  if (paths.empty()) throw SceneError("comm_channel_ft: empty path list");
  GridSignal<Scalar> h(grid, Domain::FT);
  for (const auto& p : paths) {
    const auto alpha = rng.complex_gaussian(p.variance);
    detail::accumulate_path<Scalar>(h.data, grid,
                                    std::complex<Scalar>(alpha.real(), alpha.imag()),
                                    static_cast<Scalar>(p.beam_gain),
                                    static_cast<Scalar>(p.delay),
                                    static_cast<Scalar>(p.doppler), shape);
  }
  return h;
}

/// Same channel with the path amplitudes pinned (analytic checks).
template <typename Scalar = double>
GridSignal<Scalar> comm_channel_ft_fixed(
    const GridSpec& grid, const std::vector<PathSpec>& paths,
    const std::vector<std::complex<Scalar>>& alphas,
    PulseShape shape = PulseShape::DirichletFlat) {
  if (paths.empty()) throw SceneError("comm_channel_ft_fixed: empty path list");
  GridSignal<Scalar> h(grid, Domain::FT);
  for (std::size_t u = 0; u < paths.size(); ++u)
    detail::accumulate_path<Scalar>(h.data, grid, alphas.at(u),
                                    static_cast<Scalar>(paths[u].beam_gain),
                                    static_cast<Scalar>(paths[u].delay),
                                    static_cast<Scalar>(paths[u].doppler), shape);
  return h;
}

/**
 * Monostatic sensing channel in the FT domain. Target q contributes a
 * two-way path with scattering amplitude beta_q ~ CN(0, sigma_q^2),
 * sigma_q^2 = Gamma_q c^2 / ((4pi)^3 f0^2 R^4). True delays are retained
 * (no Rx synchronization on the sensing side).
 */
template <typename Scalar = double>
GridSignal<Scalar> sensing_channel_ft(const GridSpec& grid,
                                      const std::vector<TargetSpec>& targets,
                                      Rng& rng,
                                      PulseShape shape = PulseShape::DirichletFlat) {
  if (targets.empty()) throw SceneError("sensing_channel_ft: empty target list");
  GridSignal<Scalar> h(grid, Domain::FT);
  for (const auto& t : targets) {
    const double var = radar_target_variance(t.rcs, grid.f0, t.range);
    const auto beta = rng.complex_gaussian(var);
    detail::accumulate_path<Scalar>(h.data, grid,
                                    std::complex<Scalar>(beta.real(), beta.imag()),
                                    static_cast<Scalar>(t.beam_gain),
                                    static_cast<Scalar>(t.delay()),
                                    static_cast<Scalar>(t.doppler(grid.f0)), shape);
  }
  return h;
}

/// Sensing channel with deterministic scattering amplitudes.
template <typename Scalar = double>
GridSignal<Scalar> sensing_channel_ft_fixed(
    const GridSpec& grid, const std::vector<TargetSpec>& targets,
    const std::vector<std::complex<Scalar>>& betas,
    PulseShape shape = PulseShape::DirichletFlat) {
  if (targets.empty())
    throw SceneError("sensing_channel_ft_fixed: empty target list");
  GridSignal<Scalar> h(grid, Domain::FT);
  for (std::size_t q = 0; q < targets.size(); ++q)
    detail::accumulate_path<Scalar>(h.data, grid, betas.at(q),
                                    static_cast<Scalar>(targets[q].beam_gain),
                                    static_cast<Scalar>(targets[q].delay()),
                                    static_cast<Scalar>(targets[q].doppler(grid.f0)),
                                    shape);
  return h;
}

/**
 * Analytic DD-domain sensing channel for deterministic beta (noiseless).
 * Exact closed form of ft_to_dd(sensing_channel_ft_fixed(...)) with the flat
 * pulse: per target, two Dirichlet kernels with half-bin linear phases,
 *   H(l, p) = beta zeta / sqrt(MN) * e^{-j pi x / M} D_M(x) e^{-j pi y / N} D_N(y),
 * x = l - tau/dtau, y = nu/dnu - p,  D_K(t) = sin(pi t) / sin(pi t / K).
 */
template <typename Scalar = double>
GridSignal<Scalar> dd_sensing_channel(const GridSpec& grid,
                                      const std::vector<TargetSpec>& targets,
                                      const std::vector<std::complex<Scalar>>& betas) {
  if (targets.empty()) throw SceneError("dd_sensing_channel: empty target list");
  using Cplx = std::complex<Scalar>;
  const auto res = resolution_of(grid);
  GridSignal<Scalar> h(grid, Domain::DD);
  const Scalar inv_root = Scalar(1) / std::sqrt(Scalar(grid.M) * grid.N);
  auto dirichlet = [](Scalar t, int K) -> Scalar {
    return dirichlet_kernel(static_cast<double>(t), K);
  };
  for (std::size_t q = 0; q < targets.size(); ++q) {
    const auto& t = targets[q];
    const Scalar l_true = static_cast<Scalar>(t.delay() / res.delta_tau);
    const Scalar p_true = static_cast<Scalar>(t.doppler(grid.f0) / res.delta_nu);
    const Cplx gain = betas.at(q) * static_cast<Scalar>(t.beam_gain) * inv_root;
    Eigen::Vector<Cplx, Eigen::Dynamic> del(grid.M), dop(grid.N);
    for (int l = 0; l < grid.M; ++l) {
      const Scalar x = Scalar(l) - l_true;
      const Scalar ang = -static_cast<Scalar>(pi) * x / Scalar(grid.M);
      del(l) = Cplx(std::cos(ang), std::sin(ang)) * dirichlet(x, grid.M);
    }
    for (int col = 0; col < grid.N; ++col) {
      const Scalar y = p_true - Scalar(grid.n_of_col(col));
      const Scalar ang = -static_cast<Scalar>(pi) * y / Scalar(grid.N);
      dop(col) = Cplx(std::cos(ang), std::sin(ang)) * dirichlet(y, grid.N);
    }
    h.data.noalias() += gain * del * dop.transpose();
  }
  return h;
}

/// Element-wise channel application Y = H (.) X.
template <typename Scalar>
GridSignal<Scalar> apply_channel(const GridSignal<Scalar>& h,
                                 const GridSignal<Scalar>& x) {
  require_same_grid(h.grid, x.grid, "apply_channel");
  GridSignal<Scalar> y(x.grid, x.domain);
  y.data = h.data.cwiseProduct(x.data);
  return y;
}

/// Adds i.i.d. circular complex Gaussian noise; BS side scales by L.
template <typename Scalar>
GridSignal<Scalar> add_noise(const GridSignal<Scalar>& y, const NoiseSpec& noise,
                             RxSide side, Rng& rng) {
  const double var =
      side == RxSide::BS ? noise.sigma_z2 * noise.L : noise.sigma_z2;
  GridSignal<Scalar> out = y;
  if (var <= 0.0) return out;
  for (int col = 0; col < out.data.cols(); ++col)
    for (int row = 0; row < out.data.rows(); ++row) {
      const auto z = rng.complex_gaussian(var);
      out.data(row, col) += std::complex<Scalar>(z.real(), z.imag());
    }
  return out;
}

}  // namespace isac
