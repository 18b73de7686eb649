#include <complex>
#include <vector>

#include "doctest.h"
#include "isac/channel.hpp"
#include "isac/transform.hpp"

using namespace isac;
using Cplx = std::complex<double>;

TEST_CASE("single LOS path with zero delay/Doppler gives all-ones") {
  const auto g = build_grid(16, 8, 1e6, 0.0, 1e9);
  std::vector<PathSpec> paths = {{1.0, 0.0, 0.0, 1.0}};
  const auto h = comm_channel_ft_fixed<double>(g, paths, {Cplx(1.0, 0.0)});
  CHECK((h.data.array() - Cplx(1.0, 0.0)).abs().maxCoeff() < 1e-12);
}

TEST_CASE("on-grid delay produces the expected frequency phase ramp") {
  const auto g = build_grid(32, 8, 1e6, 0.0, 1e9);
  const auto res = resolution_of(g);
  const int q = 5;
  std::vector<PathSpec> paths = {{1.0, q * res.delta_tau, 0.0, 1.0}};
  const auto h = comm_channel_ft_fixed<double>(g, paths, {Cplx(1.0, 0.0)});
  for (int r = 0; r < g.M; ++r) {
    const double m = g.m_of_row(r);
    const double ang = -2.0 * pi * m * q / g.M;
    CHECK(std::abs(h.data(r, 0) - Cplx(std::cos(ang), std::sin(ang))) < 1e-12);
  }
  // Same ramp via the sensing channel for a target at tau = 50 dtau.
  const auto gs = build_grid(256, 4, 1e6, 0.0, 1e9);
  const auto rs = resolution_of(gs);
  TargetSpec t;
  t.range = 50.0 * rs.delta_tau * speed_of_light / 2.0;
  t.velocity = 0.0;
  t.beam_gain = 1.0;
  const auto hs = sensing_channel_ft_fixed<double>(gs, {t}, {Cplx(1.0, 0.0)});
  for (int r = 0; r < gs.M; ++r) {
    const double m = gs.m_of_row(r);
    const double ang = -2.0 * pi * m * 50.0 / gs.M;
    CHECK(std::abs(hs.data(r, 1) - Cplx(std::cos(ang), std::sin(ang))) < 1e-11);
  }
}

TEST_CASE("link-budget closures follow the stated exponents") {
  // Friis: doubling range costs 6.02 dB.
  const double a = friis_path_variance(30e9, 50.0);
  const double b = friis_path_variance(30e9, 100.0);
  CHECK(linear_to_db(a / b) == doctest::Approx(6.0206).epsilon(1e-4));
  // Radar equation: doubling range costs 12.04 dB.
  const double c = radar_target_variance(1.0, 30e9, 50.0);
  const double d = radar_target_variance(1.0, 30e9, 100.0);
  CHECK(linear_to_db(c / d) == doctest::Approx(12.0412).epsilon(1e-4));
}

TEST_CASE("mean received power vs range fits the -20 / -40 dB per decade laws") {
  auto fit_slope = [](const std::vector<double>& log_r,
                      const std::vector<double>& db) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(log_r.size());
    for (int i = 0; i < n; ++i) {
      sx += log_r[i];
      sy += db[i];
      sxx += log_r[i] * log_r[i];
      sxy += log_r[i] * db[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  std::vector<double> logs, comm_db, sen_db;
  for (double r = 10.0; r <= 1000.0; r *= 1.5) {
    logs.push_back(std::log10(r));
    comm_db.push_back(linear_to_db(friis_path_variance(30e9, r)));
    sen_db.push_back(linear_to_db(radar_target_variance(1.0, 30e9, r)));
  }
  CHECK(std::abs(fit_slope(logs, comm_db) + 20.0) < 0.5);
  CHECK(std::abs(fit_slope(logs, sen_db) + 40.0) < 0.5);
}

TEST_CASE("two coincident targets double the mean channel power") {
  const auto g = build_grid(8, 4, 1e6, 0.0, 1e9);
  TargetSpec t;
  t.rcs = 1.0;
  t.range = 20.0;
  t.beam_gain = 1.0;
  Rng rng(77);
  const double var1 = radar_target_variance(t.rcs, g.f0, t.range);
  double single = 0.0, twin = 0.0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    const auto h1 = sensing_channel_ft(g, {t}, rng);
    const auto h2 = sensing_channel_ft(g, {t, t}, rng);
    single += h1.energy();
    twin += h2.energy();
  }
  CHECK(std::abs(twin / single - 2.0) < 0.06);
  CHECK(std::abs(single / trials / (g.M * g.N) / var1 - 1.0) < 0.03);
}

TEST_CASE("apply_channel basics") {
  const auto g = build_grid(8, 4, 1e6, 0.0, 1e9);
  Rng rng(3);
  GridSignal<> x(g, Domain::FT);
  for (int c = 0; c < g.N; ++c)
    for (int r = 0; r < g.M; ++r) x.data(r, c) = rng.complex_gaussian(1.0);
  GridSignal<> ones(g, Domain::FT);
  ones.data.setConstant(Cplx(1.0, 0.0));
  CHECK((apply_channel(ones, x).data - x.data).cwiseAbs().maxCoeff() == 0.0);
  GridSignal<> zero(g, Domain::FT);
  CHECK(apply_channel(x, zero).energy() == 0.0);
  GridSignal<> scaled = ones;
  scaled.data *= Cplx(0.0, 2.0);
  CHECK(apply_channel(scaled, x).energy() ==
        doctest::Approx(4.0 * x.energy()).epsilon(1e-12));
}

TEST_CASE("add_noise calibration and BS scaling") {
  const auto g = build_grid(1024, 128, 1e9 / 1024, 0.102e-6, 30e9);
  GridSignal<> silence(g, Domain::FT);
  NoiseSpec noise{2.5e-13, 100};
  Rng rng(123);
  const auto ue = add_noise(silence, noise, RxSide::UE, rng);
  const double ue_var = ue.energy() / (g.M * g.N);
  CHECK(std::abs(ue_var / noise.sigma_z2 - 1.0) < 0.03);
  const auto bs = add_noise(silence, noise, RxSide::BS, rng);
  const double bs_var = bs.energy() / (g.M * g.N);
  CHECK(linear_to_db(bs_var / ue_var) == doctest::Approx(20.0).epsilon(0.02));
  // sigma_z2 = 0 is the identity.
  NoiseSpec off{0.0, 1};
  const auto same = add_noise(silence, off, RxSide::UE, rng);
  CHECK(same.energy() == 0.0);
}

TEST_CASE("thermal noise closure") {
  const double s = thermal_noise_power(1e9 / 1024, 10.0);
  CHECK(linear_to_db(s / (boltzmann_k * 290.0 * 1e9 / 1024)) ==
        doctest::Approx(10.0));
}

TEST_CASE("analytic DD channel matches the transform path (master check)") {
  const auto g = build_grid(64, 16, 1e6, 0.0, 28e9);
  const auto res = resolution_of(g);
  auto target_at = [&](double delay_bins, double doppler_bins) {
    TargetSpec t;
    t.range = delay_bins * res.delta_tau * speed_of_light / 2.0;
    t.velocity =
        doppler_bins * res.delta_nu * speed_of_light / (2.0 * g.f0);
    t.beam_gain = 2.0;
    return t;
  };
  SUBCASE("on-grid single target") {
    const std::vector<TargetSpec> targets = {target_at(7.0, 3.0)};
    const std::vector<Cplx> betas = {Cplx(0.8, -0.4)};
    const auto via_ft =
        ft_to_dd(sensing_channel_ft_fixed<double>(g, targets, betas));
    const auto direct = dd_sensing_channel<double>(g, targets, betas);
    CHECK((via_ft.data - direct.data).cwiseAbs().maxCoeff() < 1e-9);
    // Peak magnitude sqrt(MN) |beta zeta| at the true bin.
    CHECK(std::abs(direct.data(7, g.col_of(3))) ==
          doctest::Approx(std::sqrt(64.0 * 16.0) * std::abs(betas[0]) * 2.0)
              .epsilon(1e-9));
  }
  SUBCASE("off-grid targets") {
    const std::vector<TargetSpec> targets = {target_at(7.37, -2.61),
                                             target_at(20.11, 5.75)};
    const std::vector<Cplx> betas = {Cplx(0.5, 0.1), Cplx(-0.3, 0.9)};
    const auto via_ft =
        ft_to_dd(sensing_channel_ft_fixed<double>(g, targets, betas));
    const auto direct = dd_sensing_channel<double>(g, targets, betas);
    CHECK((via_ft.data - direct.data).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("Dirichlet kernel limits used by the DD channel") {
  const auto g = build_grid(16, 8, 1e6, 0.0, 1e9);
  const auto res = resolution_of(g);
  // On-grid target: exactly one nonzero column/row pattern, zero elsewhere.
  TargetSpec t;
  t.range = 4.0 * res.delta_tau * speed_of_light / 2.0;
  t.velocity = 0.0;
  t.beam_gain = 1.0;
  const auto dd = dd_sensing_channel<double>(g, {t}, {Cplx(1.0, 0.0)});
  for (int l = 0; l < g.M; ++l)
    for (int c = 0; c < g.N; ++c) {
      const double mag = std::abs(dd.data(l, c));
      if (l == 4 && c == g.col_of(0))
        CHECK(mag == doctest::Approx(std::sqrt(16.0 * 8.0)).epsilon(1e-12));
      else
        CHECK(mag < 1e-9);
    }
}

TEST_CASE("channel entries stay within the amplitude budget") {
  const auto g = build_grid(32, 8, 1e6, 0.0, 1e9);
  std::vector<PathSpec> paths = {{1.0, 3e-7, 100.0, 1.5},
                                 {1.0, 9e-7, -400.0, 0.5}};
  const std::vector<Cplx> alphas = {Cplx(0.6, 0.3), Cplx(-0.2, 0.7)};
  const auto h = comm_channel_ft_fixed<double>(g, paths, alphas);
  const double bound =
      std::abs(alphas[0]) * 1.5 + std::abs(alphas[1]) * 0.5 + 1e-12;
  CHECK(h.data.cwiseAbs().maxCoeff() <= bound);
}

TEST_CASE("Dirichlet kernel values and zeros") {
  for (int K : {8, 16, 128}) {
    CHECK(dirichlet_kernel(0.0, K) == static_cast<double>(K));
    for (int k = 1; k < K; ++k) CHECK(dirichlet_kernel(k, K) == 0.0);
    // Period: at t = K the kernel peaks again (sign alternates for even K).
    CHECK(std::abs(dirichlet_kernel(K, K)) == static_cast<double>(K));
    CHECK(dirichlet_kernel(2.0 * K, K) == static_cast<double>(K));
  }
  // Off-grid values match the sine ratio.
  CHECK(dirichlet_kernel(0.5, 8) ==
        doctest::Approx(std::sin(pi * 0.5) / std::sin(pi * 0.5 / 8)));
}

TEST_CASE("pulse spectrum options") {
  const auto g = build_grid(64, 8, 1e6, 0.0, 1e9);
  // Flat: unity everywhere.
  for (int m = -32; m < 32; ++m)
    CHECK(pulse_spectrum(PulseShape::DirichletFlat, m, g) == 1.0);
  // Rect-in-delay: sinc(m/M), unity at center, sin(pi x)/(pi x) elsewhere.
  CHECK(pulse_spectrum(PulseShape::RectInDelay, 0, g) == 1.0);
  CHECK(pulse_spectrum(PulseShape::RectInDelay, 16, g) ==
        doctest::Approx(std::sin(pi * 0.25) / (pi * 0.25)));
  // Raised cosine: unity in the flat region, zero beyond the rolloff.
  CHECK(pulse_spectrum(PulseShape::RaisedCosine, 0, g) == 1.0);
  CHECK(pulse_spectrum(PulseShape::RaisedCosine, 16, g) == 1.0);
  CHECK(pulse_spectrum(PulseShape::RaisedCosine, 32, g) < 1.0);
}

TEST_CASE("empty scenes are rejected") {
  const auto g = build_grid(8, 4, 1e6, 0.0, 1e9);
  Rng rng(1);
  CHECK_THROWS_AS(comm_channel_ft(g, {}, rng), SceneError);
  CHECK_THROWS_AS(sensing_channel_ft(g, {}, rng), SceneError);
  CHECK_THROWS_AS(dd_sensing_channel<double>(g, {}, {}), SceneError);
}
