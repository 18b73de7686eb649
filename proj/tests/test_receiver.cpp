#include <cmath>
#include <complex>

#include "doctest.h"
#include "isac/receiver.hpp"
#include "isac/waveform.hpp"

using namespace isac;
using Cplx = std::complex<double>;

namespace {

TargetSpec target_at_bins(const GridSpec& g, double delay_bins,
                          double doppler_bins, double beam_gain = 1.0) {
  const auto res = resolution_of(g);
  TargetSpec t;
  t.range = delay_bins * res.delta_tau * speed_of_light / 2.0;
  t.velocity = doppler_bins * res.delta_nu * speed_of_light / (2.0 * g.f0);
  t.beam_gain = beam_gain;
  return t;
}

}  // namespace

TEST_CASE("ue_sdnr: trivial limits and the closed-form bound") {
  const auto g = build_grid(8, 4, 1e6, 0.0, 1e9);
  GridSignal<> b(g, Domain::FT), d(g, Domain::FT), z(g, Domain::FT);
  b.data.setConstant(Cplx(2.0, 0.0));
  std::vector<IndexPair> lambda = {{0, 0}, {1, 1}, {-4, -2}};
  // No distortion, no noise -> +inf sentinel.
  CHECK(std::isinf(ue_sdnr_empirical(b, d, z, lambda)));
  // Empty set is an error.
  CHECK_THROWS_AS(ue_sdnr_empirical(b, d, z, {}), AllocationError);
  // With distortion only, ratio is |b|^2/|d|^2.
  d.data.setConstant(Cplx(0.0, 1.0));
  CHECK(ue_sdnr_empirical(b, d, z, lambda) == doctest::Approx(4.0));
  // Cancellation drops the sensing term.
  CHECK(std::isinf(ue_sdnr_empirical(b, d, z, lambda, true)));

  // kappa^2 sigma_k^2 = 10, kappa^2 sigma_sen^2 = 0.5, sigma_z^2 = 0.5 -> 10 dB.
  const double bound = ue_sdnr_bound(2.0, 5.0, 0.25, 0.5);
  CHECK(linear_to_db(bound) == doctest::Approx(10.0).epsilon(1e-12));
  // Cancellation bound: kappa^2 sigma_k^2 / sigma_z^2.
  CHECK(ue_sdnr_bound(2.0, 5.0, 0.25, 0.5, true) == doctest::Approx(20.0));
}

TEST_CASE("achievable rate with CP loss") {
  const auto g = build_grid(1024, 128, 1e9 / 1024, 0.102e-6, 30e9);
  CHECK(achievable_rate(0.0, g) == 0.0);
  CHECK(g.cp_rate_loss() == doctest::Approx(0.90942).epsilon(1e-4));
  CHECK(achievable_rate(10.0, g) == doctest::Approx(3.146).epsilon(1e-3));
  CHECK_THROWS_AS(achievable_rate(-0.1, g), DomainError);
}

TEST_CASE("bs_dd_receive: unitarity and the processing-gain identity") {
  const auto g = build_grid(64, 16, 1e6, 0.0, 28e9);
  Rng rng(17);
  GridSignal<> noise_ft(g, Domain::FT);
  for (int c = 0; c < g.N; ++c)
    for (int r = 0; r < g.M; ++r) noise_ft.data(r, c) = rng.complex_gaussian(1.0);
  const auto dd = bs_dd_receive(noise_ft);
  CHECK(std::abs(dd.energy() - noise_ft.energy()) / noise_ft.energy() < 1e-12);

  // Composed sinusoid: DD peak power = MN (sigma_sen^FT)^2.
  PowerPlan<> plan;
  plan.sigma_sen_ft = 0.3;
  GridSignal<> zero(g, Domain::FT);
  const auto tx =
      compose_tx(zero, plan, dd_to_ft(synth_sensing_dd<double>(g, 5, 2)));
  const auto peak = bs_dd_receive(tx).data.cwiseAbs().maxCoeff();
  CHECK(peak * peak ==
        doctest::Approx(plan.sigma_sen_dd_sq(g)).epsilon(1e-12));
}

TEST_CASE("periodogram: noiseless on-grid recovery is exact (exhaustive 16x8)") {
  const auto g = build_grid(16, 8, 1e6, 0.0, 28e9);
  const auto res = resolution_of(g);
  PeriodogramOptions opts;
  opts.q_max = 1;
  opts.gamma_thr_db = 3.0;
  for (int l = 0; l < g.M; ++l) {
    for (int p = -g.N / 2; p <= g.N / 2 - 1; ++p) {
      const auto dd = dd_sensing_channel<double>(
          g, {target_at_bins(g, l, p)}, {Cplx(1.0, 0.0)});
      GridSignal<> y = dd;  // impulse at (0, 0): channel is the received map
      const auto est = periodogram_estimate(y, 0, 0, opts);
      REQUIRE(est.detections.size() == 1);
      CHECK(est.detections[0].tau_s ==
            doctest::Approx(l * res.delta_tau).epsilon(1e-12));
      CHECK(est.detections[0].nu_hz ==
            doctest::Approx(p * res.delta_nu).scale(res.delta_nu).epsilon(1e-12));
    }
  }
}

TEST_CASE("periodogram honours the known impulse placement") {
  const auto g = build_grid(32, 8, 1e6, 0.0, 28e9);
  const auto res = resolution_of(g);
  const int l_i = 6, p_i = -3;
  // Received DD map: target response shifted by the impulse position.
  PowerPlan<> plan;
  plan.sigma_sen_ft = 1.0;
  GridSignal<> zero(g, Domain::FT);
  const auto tx =
      compose_tx(zero, plan, dd_to_ft(synth_sensing_dd<double>(g, l_i, p_i)));
  const auto h = sensing_channel_ft_fixed<double>(
      g, {target_at_bins(g, 9.0, 2.0)}, {Cplx(1.0, 0.0)});
  const auto y_dd = bs_dd_receive(apply_channel(h, tx));
  PeriodogramOptions opts;
  opts.q_max = 1;
  const auto est = periodogram_estimate(y_dd, l_i, p_i, opts);
  REQUIRE(est.detections.size() == 1);
  CHECK(est.detections[0].tau_s ==
        doctest::Approx(9.0 * res.delta_tau).epsilon(1e-9));
  CHECK(est.detections[0].nu_hz ==
        doctest::Approx(2.0 * res.delta_nu).epsilon(1e-9));
}

TEST_CASE("periodogram: zero input gives no detections") {
  const auto g = build_grid(16, 8, 1e6, 0.0, 28e9);
  GridSignal<> y(g, Domain::DD);
  PeriodogramOptions opts;
  opts.q_max = 4;
  CHECK(periodogram_estimate(y, 0, 0, opts).detections.empty());
}

TEST_CASE("periodogram separates two equal on-grid targets") {
  const auto g = build_grid(32, 8, 1e6, 0.0, 28e9);
  const auto res = resolution_of(g);
  const auto dd = dd_sensing_channel<double>(
      g, {target_at_bins(g, 5, 0), target_at_bins(g, 9, 0)},
      {Cplx(1.0, 0.0), Cplx(1.0, 0.0)});
  GridSignal<> y = dd;
  PeriodogramOptions opts;
  opts.q_max = 2;
  opts.min_separation = 2;
  const auto est = periodogram_estimate(y, 0, 0, opts);
  REQUIRE(est.detections.size() == 2);
  const double t0 = est.detections[0].tau_s / res.delta_tau;
  const double t1 = est.detections[1].tau_s / res.delta_tau;
  CHECK(std::min(t0, t1) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(std::max(t0, t1) == doctest::Approx(9.0).epsilon(1e-12));
  // Detections sorted by descending power.
  CHECK(est.detections[0].peak_power >= est.detections[1].peak_power);
}

TEST_CASE("coupling factor chi") {
  const auto g = build_grid(64, 16, 1e6, 0.0, 28e9);
  const auto res = resolution_of(g);
  // Coincident targets: chi = 1 exactly.
  CHECK(coupling_chi(g, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  // Doppler offset of an exact nonzero bin multiple: chi = 0.
  for (int k : {1, 2, 7, 15}) {
    CHECK(coupling_chi(g, 0.0, k * res.delta_nu) == doctest::Approx(0.0));
    CHECK(coupling_chi(g, 0.0, -k * res.delta_nu) == doctest::Approx(0.0));
  }
  // Delay offset of an exact bin multiple: also 0 (Dirichlet zero).
  CHECK(coupling_chi(g, 3.0 * res.delta_tau, 0.0) == doctest::Approx(0.0));
  // In between, strictly within (0, 1).
  const double mid = coupling_chi(g, 0.4 * res.delta_tau, 0.3 * res.delta_nu);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
}

TEST_CASE("sensing SDNR: sentinels, coupling and the bound") {
  const auto g = build_grid(64, 16, 1e6, 0.0, 28e9);
  Allocation alloc;
  alloc.user_sets = {};
  alloc.m_com = 32;
  alloc.m_ob = 32;
  PowerPlan<> plan;
  plan.sigma_sen_ft = 0.1;
  NoiseSpec off{0.0, 100};

  // Single target, no comm power, no noise -> +inf.
  const auto single =
      sensing_sdnr<double>({target_at_bins(g, 5, 0, 10.0)}, plan, alloc, g, off);
  CHECK(std::isinf(single[0].sdnr));
  CHECK(std::isinf(single[0].bound));

  // Two coincident targets: chi = 1, SDNR -> kappa_q^2 / kappa_j^2 = 1.
  const auto twin = sensing_sdnr<double>(
      {target_at_bins(g, 5, 0, 10.0), target_at_bins(g, 5, 0, 10.0)}, plan,
      alloc, g, off);
  CHECK(twin[0].chi_row_sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(twin[0].bound == doctest::Approx(1.0).epsilon(1e-12));

  // Integer-bin Doppler offset: chi = 0, back to +inf without noise/comm.
  const auto split = sensing_sdnr<double>(
      {target_at_bins(g, 5, 0, 10.0), target_at_bins(g, 5, 3, 10.0)}, plan,
      alloc, g, off);
  CHECK(split[0].chi_row_sum == doctest::Approx(0.0));
  CHECK(std::isinf(split[0].bound));
}

TEST_CASE("DD peak-to-noise-floor grows 3 dB per doubling of N") {
  std::vector<double> log2n, peak_db;
  for (int N : {32, 64, 128, 256}) {
    const auto g = build_grid(64, N, 1e6, 0.1e-6, 28e9);
    Rng rng(900 + N);
    PowerPlan<> plan;
    plan.sigma_sen_ft = 1.0;
    GridSignal<> zero(g, Domain::FT);
    const auto tx =
        compose_tx(zero, plan, dd_to_ft(synth_sensing_dd<double>(g, 0, 0)));
    const auto h = sensing_channel_ft_fixed<double>(
        g, {target_at_bins(g, 11.0, 0.0)}, {Cplx(1.0, 0.0)});
    NoiseSpec noise{1e-2, 1};
    const auto y = add_noise(apply_channel(h, tx), noise, RxSide::BS, rng);
    const auto y_dd = bs_dd_receive(y);
    PeriodogramOptions opts;
    opts.q_max = 1;
    const auto est = periodogram_estimate(y_dd, 0, 0, opts);
    REQUIRE(est.detections.size() == 1);
    log2n.push_back(std::log2(static_cast<double>(N)));
    peak_db.push_back(linear_to_db(est.detections[0].peak_power / est.noise_floor));
  }
  // Least-squares slope in dB per doubling.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(log2n.size());
  for (int i = 0; i < n; ++i) {
    sx += log2n[i];
    sy += peak_db[i];
    sxx += log2n[i] * log2n[i];
    sxy += log2n[i] * peak_db[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(std::abs(slope - 3.0103) < 0.5);
}

TEST_CASE("UE SDNR bound with the max channel gain dominates the empirical") {
  const auto g = build_grid(64, 16, 1e6, 0.1e-6, 28e9);
  Rng alloc_rng(21);
  const auto alloc =
      allocate_users(g, 1, 32, 0.5, AllocationScheme::RandomUniform, alloc_rng);
  // Multipath scene; the max gain is the coherent sum (sum_u sigma_u zeta_u)^2
  // while the mean gain is sum_u sigma_u^2 zeta_u^2.
  std::vector<PathSpec> paths = {{1.0, 3e-8, 200.0, 1.0},
                                 {0.25, 8e-8, -500.0, 1.0},
                                 {0.0625, 1.3e-7, 900.0, 1.0},
                                 {0.015625, 2e-7, -150.0, 1.0}};
  const double kappa2_mean = comm_channel_gain(paths);
  double amp_sum = 0.0;
  for (const auto& p : paths) amp_sum += std::sqrt(p.variance) * p.beam_gain;
  const double kappa2_max = amp_sum * amp_sum;
  PowerPlan<> plan;
  plan.sigma_com = {1.0};
  plan.sigma_sen_ft = 0.05;
  const double sigma_z2 = 0.01;
  const NoiseSpec noise{sigma_z2, 1};
  const double sen2 = plan.sigma_sen_ft * plan.sigma_sen_ft;
  const double bound_max = ue_sdnr_bound(kappa2_max, 1.0, sen2, sigma_z2);

  Rng rng(22);
  int dominated = 0;
  const int trials = 200;
  double mean_sdnr = 0.0;
  const auto sen_ft = dd_to_ft(synth_sensing_dd<double>(g, 0, 0));
  for (int i = 0; i < trials; ++i) {
    const auto h = comm_channel_ft(g, paths, rng);
    const auto comm = synth_comm(alloc, g, 4, plan, rng);
    GridSignal<> zero(g, Domain::FT);
    const auto b = apply_channel(h, comm);
    const auto d = apply_channel(h, compose_tx(zero, plan, sen_ft));
    GridSignal<> silence(g, Domain::FT);
    const auto z = add_noise(silence, noise, RxSide::UE, rng);
    const auto rep = ue_report(b, d, z, alloc.user_sets.front(), kappa2_max,
                               1.0, sen2, sigma_z2);
    CHECK(rep.sdnr_ft_bound == doctest::Approx(bound_max));
    CHECK(rep.rate >= 0.0);
    mean_sdnr += rep.sdnr_ft;
    if (rep.sdnr_ft <= rep.sdnr_ft_bound) ++dominated;
  }
  CHECK(dominated >= static_cast<int>(0.95 * trials));
  // The mean-gain bound still dominates the trial average (Jensen).
  mean_sdnr /= trials;
  CHECK(mean_sdnr <=
        ue_sdnr_bound(kappa2_mean, 1.0, sen2, sigma_z2) * 1.05);
}

TEST_CASE("cancel_ofdm removes the known component") {
  const auto g = build_grid(16, 8, 1e6, 0.0, 28e9);
  Rng rng(8);
  GridSignal<> comm(g, Domain::FT), rest(g, Domain::FT);
  for (int c = 0; c < g.N; ++c)
    for (int r = 0; r < g.M; ++r) {
      comm.data(r, c) = rng.complex_gaussian(1.0);
      rest.data(r, c) = rng.complex_gaussian(1.0);
    }
  GridSignal<> y = rest;
  y.data += comm.data;
  const auto cleaned = cancel_ofdm(y, comm);
  CHECK((cleaned.data - rest.data).cwiseAbs().maxCoeff() < 1e-12);
  // Zero comm component is the identity.
  GridSignal<> zero(g, Domain::FT);
  CHECK((cancel_ofdm(y, zero).data - y.data).cwiseAbs().maxCoeff() == 0.0);
  // Comm-only input goes to zero energy.
  CHECK(cancel_ofdm(comm, comm).energy() == 0.0);
}
