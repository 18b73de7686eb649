#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "isac/errors.hpp"
#include "isac/grid.hpp"
#include "isac/rng.hpp"
#include "isac/signal.hpp"
#include "isac/transform.hpp"

namespace isac {

/// Square QAM constellation scaled to unit average symbol energy.
template <typename Scalar = double>
std::vector<std::complex<Scalar>> qam_constellation(int order) {
  if (order != 4 && order != 16 && order != 64 && order != 256)
    throw ConfigError("qam_constellation: order must be one of 4, 16, 64, 256");
  const int side = static_cast<int>(std::lround(std::sqrt(double(order))));
  // Average energy of {+-1, +-3, ...} levels on both axes is 2(Q-1)/3.
  const Scalar scale = std::sqrt(Scalar(3) / (Scalar(2) * (order - 1)));
  std::vector<std::complex<Scalar>> points;
  points.reserve(static_cast<std::size_t>(order));
  for (int i = 0; i < side; ++i)
    for (int q = 0; q < side; ++q)
      points.emplace_back(scale * Scalar(2 * i - side + 1),
                          scale * Scalar(2 * q - side + 1));
  return points;
}

/**
 * Draws unit-energy QAM symbols on each UE's resource set and scales them
 * by that UE's amplitude from the plan, i.e. returns Sigma_com (.) S_com.
 * Unallocated bins stay zero.
 */
template <typename Scalar = double>
GridSignal<Scalar> synth_comm(const Allocation& alloc, const GridSpec& grid,
                              int qam_order, const PowerPlan<Scalar>& plan,
                              Rng& rng) {
  const auto points = qam_constellation<Scalar>(qam_order);
  GridSignal<Scalar> sig(grid, Domain::FT);
  for (std::size_t k = 0; k < alloc.user_sets.size(); ++k) {
    const Scalar amp =
        k < plan.sigma_com.size() ? plan.sigma_com[k] : Scalar(0);
    for (const auto& idx : alloc.user_sets[k]) {
      const auto& a = points[rng.uniform_int(points.size())];
      sig.at(idx.m, idx.n) = amp * a;
    }
  }
  return sig;
}

/// DD impulse of unit amplitude at delay bin l_i, Doppler bin p_i.
template <typename Scalar = double>
GridSignal<Scalar> synth_sensing_dd(const GridSpec& grid, int l_i, int p_i) {
  if (l_i < 0 || l_i > grid.M - 1)
    throw ConfigError("synth_sensing_dd: delay bin out of [0, M-1]");
  if (p_i < -grid.N / 2 || p_i > grid.N / 2 - 1)
    throw ConfigError("synth_sensing_dd: Doppler bin out of [-N/2, N/2-1]");
  GridSignal<Scalar> sig(grid, Domain::DD);
  sig.data(l_i, grid.col_of(p_i)) = std::complex<Scalar>(1, 0);
  return sig;
}

/**
 * Superposes the scaled communication signal and the sensing sinusoid:
 *   X = Sigma_com (.) S_com + sigma_sen_ft * sqrt(MN) * S_sen_ft.
 *
 * S_sen_ft is the unit-energy image of the DD impulse (entry modulus
 * 1/sqrt(MN)); the sqrt(MN) factor makes sigma_sen_ft the per-bin amplitude
 * of the transmitted sinusoid, so that P_sen = M sigma_sen_ft^2 and the DD
 * peak obeys (sigma_sen^DD)^2 = MN (sigma_sen^FT)^2.
 */
template <typename Scalar = double>
GridSignal<Scalar> compose_tx(const GridSignal<Scalar>& comm_scaled,
                              const PowerPlan<Scalar>& plan,
                              const GridSignal<Scalar>& sensing_ft) {
  require_domain(comm_scaled.domain, Domain::FT, "compose_tx");
  require_domain(sensing_ft.domain, Domain::FT, "compose_tx");
  require_same_grid(comm_scaled.grid, sensing_ft.grid, "compose_tx");
  const GridSpec& g = comm_scaled.grid;
  const Scalar gain =
      plan.sigma_sen_ft * std::sqrt(static_cast<Scalar>(g.M) * g.N);
  GridSignal<Scalar> tx(g, Domain::FT);
  tx.data = comm_scaled.data + gain * sensing_ft.data;
  return tx;
}

}  // namespace isac
