#include <complex>

#include "doctest.h"
#include "isac/transform.hpp"
#include "isac/waveform.hpp"

using namespace isac;
using Cplx = std::complex<double>;

namespace {

GridSignal<> random_signal(const GridSpec& g, Domain d, Rng& rng) {
  GridSignal<> s(g, d);
  for (int c = 0; c < g.N; ++c)
    for (int r = 0; r < g.M; ++r) s.data(r, c) = rng.complex_gaussian(1.0);
  return s;
}

}  // namespace

TEST_CASE("DD impulse at the origin maps to the flat sinusoid") {
  const auto g = build_grid(16, 8, 1e6, 0.0, 1e9);
  const auto ft = dd_to_ft(synth_sensing_dd<double>(g, 0, 0));
  const Cplx expect(1.0 / std::sqrt(16.0 * 8.0), 0.0);
  for (int r = 0; r < g.M; ++r)
    for (int c = 0; c < g.N; ++c)
      CHECK(std::abs(ft.data(r, c) - expect) < 1e-14);
}

TEST_CASE("DD impulse maps to the exact closed-form 2D sinusoid") {
  const auto g = build_grid(32, 16, 1e6, 0.0, 1e9);
  for (const auto [li, pi_] : {std::pair{3, 5}, {31, -8}, {0, 7}, {17, -1}}) {
    const auto ft = dd_to_ft(synth_sensing_dd<double>(g, li, pi_));
    double worst = 0.0;
    for (int r = 0; r < g.M; ++r) {
      const int m = g.m_of_row(r);
      for (int c = 0; c < g.N; ++c) {
        const int n = g.n_of_col(c);
        const double ang =
            2.0 * pi * (static_cast<double>(n) * pi_ / g.N -
                        static_cast<double>(m) * li / g.M);
        const Cplx expect =
            Cplx(std::cos(ang), std::sin(ang)) / std::sqrt(32.0 * 16.0);
        worst = std::max(worst, std::abs(ft.data(r, c) - expect));
      }
    }
    CHECK(worst < 1e-12);
    // Constant modulus at every bin.
    CHECK((ft.data.cwiseAbs().array() - 1.0 / std::sqrt(32.0 * 16.0))
              .abs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("round trip is the identity and preserves energy") {
  Rng rng(11);
  for (const auto [M, N] : {std::pair{4, 4}, {8, 16}, {16, 8}, {12, 6}, {10, 14}}) {
    const auto g = build_grid(M, N, 1e6, 0.0, 1e9);
    const auto x = random_signal(g, Domain::DD, rng);
    const auto back = ft_to_dd(dd_to_ft(x));
    CHECK((back.data - x.data).cwiseAbs().maxCoeff() < 1e-10);
    const auto ft = dd_to_ft(x);
    CHECK(std::abs(ft.energy() - x.energy()) / x.energy() < 1e-10);
  }
}

TEST_CASE("FFT fast path agrees with the dense operators") {
  Rng rng(13);
  for (const auto [M, N] : {std::pair{8, 4}, {16, 8}, {64, 32}}) {
    const auto g = build_grid(M, N, 1e6, 0.1e-6, 1e9);
    const auto x = random_signal(g, Domain::DD, rng);
    // Dense reference path.
    const auto& F_m = detail::cached_dft<double>(M, true, false);
    const auto& F_n = detail::cached_dft<double>(N, true, true);
    const Eigen::MatrixXcd ref = F_m * x.data * F_n.adjoint();
    const auto fast = dd_to_ft(x);
    CHECK((fast.data - ref).cwiseAbs().maxCoeff() < 1e-12);
    GridSignal<> ftsig(g, Domain::FT);
    ftsig.data = ref;
    const Eigen::MatrixXcd ref_back = F_m.adjoint() * ref * F_n;
    const auto fast_back = ft_to_dd(ftsig);
    CHECK((fast_back.data - ref_back).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("ft_to_dd recovers impulses and flat sinusoids") {
  const auto g = build_grid(16, 8, 1e6, 0.0, 1e9);
  // all-ones / sqrt(MN) -> impulse at (0, 0)
  GridSignal<> flat(g, Domain::FT);
  flat.data.setConstant(Cplx(1.0 / std::sqrt(16.0 * 8.0), 0.0));
  const auto dd = ft_to_dd(flat);
  CHECK(std::abs(dd.data(0, g.col_of(0)) - Cplx(1.0, 0.0)) < 1e-12);
  CHECK(dd.energy() == doctest::Approx(1.0).epsilon(1e-10));
  for (int l = 0; l < g.M; ++l)
    for (int c = 0; c < g.N; ++c)
      if (l != 0 || c != g.col_of(0)) CHECK(std::abs(dd.data(l, c)) < 1e-12);
}

TEST_CASE("domain tags are enforced") {
  const auto g = build_grid(8, 4, 1e6, 0.0, 1e9);
  GridSignal<> ft(g, Domain::FT);
  GridSignal<> dd(g, Domain::DD);
  CHECK_THROWS_AS(dd_to_ft(ft), DomainError);
  CHECK_THROWS_AS(ft_to_dd(dd), DomainError);
}

TEST_CASE("time-domain stream: length, CP prefix, single-symbol inverse DFT") {
  const auto table1 = build_grid(1024, 128, 1e9 / 1024, 0.102e-6, 30e9);
  CHECK(table1.cp_samples() == 102);

  const auto g = build_grid(8, 2, 1e6, 0.25e-6, 1e9);  // M_cp = 2
  CHECK(g.cp_samples() == 2);
  Rng rng(3);
  const auto x = random_signal(g, Domain::FT, rng);
  const auto stream = to_time_domain(x);
  CHECK(stream.size() == 2u * (8 + 2));
  // CP equals the symbol tail.
  for (int sym = 0; sym < 2; ++sym) {
    const std::size_t base = static_cast<std::size_t>(sym) * 10;
    CHECK(std::abs(stream[base + 0] - stream[base + 2 + 6]) < 1e-12);
    CHECK(std::abs(stream[base + 1] - stream[base + 2 + 7]) < 1e-12);
  }

  // N = 2 grid (smallest allowed), zero CP: direct inverse DFT per symbol.
  const auto g1 = build_grid(8, 2, 1e6, 0.0, 1e9);
  const auto x1 = random_signal(g1, Domain::FT, rng);
  const auto s1 = to_time_domain(x1);
  CHECK(s1.size() == 16u);
  for (int sym = 0; sym < 2; ++sym)
    for (int i = 0; i < 8; ++i) {
      Cplx acc(0.0, 0.0);
      for (int r = 0; r < 8; ++r) {
        const double m = g1.m_of_row(r);
        const double ang = 2.0 * pi * m * i / 8.0;
        acc += x1.data(r, sym) * Cplx(std::cos(ang), std::sin(ang));
      }
      acc /= std::sqrt(8.0);
      CHECK(std::abs(s1[static_cast<std::size_t>(sym * 8 + i)] - acc) < 1e-12);
    }
}

TEST_CASE("large-grid round trip spot check stays exact") {
  const auto g = build_grid(1024, 128, 1e9 / 1024, 0.102e-6, 30e9);
  Rng rng(4);
  const auto x = random_signal(g, Domain::DD, rng);
  const auto back = ft_to_dd(dd_to_ft(x));
  CHECK((back.data - x.data).cwiseAbs().maxCoeff() < 1e-10);
}
