#include <complex>

#include "doctest.h"
#include "isac/transform.hpp"
#include "isac/waveform.hpp"

using namespace isac;
using Cplx = std::complex<double>;

TEST_CASE("constellations have unit average energy") {
  for (int order : {4, 16, 64, 256}) {
    const auto pts = qam_constellation(order);
    REQUIRE(static_cast<int>(pts.size()) == order);
    double e = 0.0;
    for (const auto& p : pts) e += std::norm(p);
    CHECK(e / order == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(qam_constellation(8), ConfigError);
}

TEST_CASE("QPSK symbols have constant modulus and exact unit mean energy") {
  const auto g = build_grid(16, 8, 1e6, 0.0, 1e9);
  Rng rng(2);
  const auto alloc =
      allocate_users(g, 1, 16, 1.0, AllocationScheme::ContiguousBlocks, rng);
  PowerPlan<> plan;
  plan.sigma_com = {1.0};
  const auto s = synth_comm(alloc, g, 4, plan, rng);
  double mean = 0.0;
  for (int c = 0; c < g.N; ++c)
    for (int r = 0; r < g.M; ++r) {
      CHECK(std::abs(s.data(r, c)) == doctest::Approx(1.0).epsilon(1e-12));
      mean += std::norm(s.data(r, c));
    }
  CHECK(mean / (16.0 * 8.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empty allocation synthesizes the zero matrix") {
  const auto g = build_grid(8, 4, 1e6, 0.0, 1e9);
  Allocation alloc;
  alloc.user_sets = {{}};
  alloc.m_com = 8;
  alloc.m_ob = 0;
  PowerPlan<> plan;
  plan.sigma_com = {1.0};
  Rng rng(1);
  const auto s = synth_comm(alloc, g, 16, plan, rng);
  CHECK(s.energy() == 0.0);
}

TEST_CASE("16-QAM seeded draw lands within 2% of unit mean energy") {
  const auto g = build_grid(1024, 128, 1e9 / 1024, 0.102e-6, 30e9);
  Rng rng(20240601);
  const auto alloc =
      allocate_users(g, 1, 512, 0.5, AllocationScheme::RandomUniform, rng);
  REQUIRE(alloc.user_sets[0].size() == 32768);
  PowerPlan<> plan;
  plan.sigma_com = {1.0};
  const auto s = synth_comm(alloc, g, 16, plan, rng);
  const double mean_energy = s.energy() / 32768.0;
  CHECK(std::abs(mean_energy - 1.0) < 0.02);
}

TEST_CASE("sensing impulse placement and bounds") {
  const auto g = build_grid(16, 8, 1e6, 0.0, 1e9);
  const auto at_origin = synth_sensing_dd<double>(g, 0, 0);
  CHECK(std::abs(at_origin.data(0, g.col_of(0)) - Cplx(1.0, 0.0)) < 1e-15);
  CHECK(at_origin.energy() == doctest::Approx(1.0));

  const auto corner = synth_sensing_dd<double>(g, 15, 3);
  CHECK(std::abs(corner.data(15, g.col_of(3)) - Cplx(1.0, 0.0)) < 1e-15);
  CHECK(corner.energy() == doctest::Approx(1.0));

  CHECK_THROWS_AS(synth_sensing_dd<double>(g, 16, 0), ConfigError);
  CHECK_THROWS_AS(synth_sensing_dd<double>(g, -1, 0), ConfigError);
  CHECK_THROWS_AS(synth_sensing_dd<double>(g, 0, 4), ConfigError);
  CHECK_THROWS_AS(synth_sensing_dd<double>(g, 0, -5), ConfigError);
}

TEST_CASE("compose_tx power bookkeeping and the DD processing-gain identity") {
  const auto g = build_grid(32, 16, 1e6, 0.0, 1e9);
  Rng rng(9);
  const auto alloc =
      allocate_users(g, 1, 16, 0.5, AllocationScheme::RandomUniform, rng);
  PowerPlan<> plan;
  plan.sigma_com = {0.7};
  plan.sigma_sen_ft = 0.05;
  const auto comm = synth_comm(alloc, g, 4, plan, rng);
  const auto sen_ft = dd_to_ft(synth_sensing_dd<double>(g, 3, -2));

  SUBCASE("sigma_sen = 0 leaves pure OFDM") {
    PowerPlan<> no_sen = plan;
    no_sen.sigma_sen_ft = 0.0;
    const auto tx = compose_tx(comm, no_sen, sen_ft);
    CHECK((tx.data - comm.data).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("comm = 0 gives the scaled sinusoid with P_sen = M sigma^2") {
    GridSignal<> zero(g, Domain::FT);
    const auto tx = compose_tx(zero, plan, sen_ft);
    // Per-bin modulus equals sigma_sen_ft.
    CHECK((tx.data.cwiseAbs().array() - plan.sigma_sen_ft).abs().maxCoeff() <
          1e-14);
    const double p_sen = tx.energy() / g.N;
    CHECK(p_sen == doctest::Approx(plan.p_sen(g)).epsilon(1e-12));
    // DD peak power is MN (sigma_sen^FT)^2, exactly.
    const auto dd = ft_to_dd(tx);
    const double peak = dd.data.cwiseAbs().maxCoeff();
    CHECK(peak * peak ==
          doctest::Approx(plan.sigma_sen_dd_sq(g)).epsilon(1e-12));
  }

  SUBCASE("superposition is linear") {
    GridSignal<> zero(g, Domain::FT);
    const auto both = compose_tx(comm, plan, sen_ft);
    PowerPlan<> no_sen = plan;
    no_sen.sigma_sen_ft = 0.0;
    const auto only_comm = compose_tx(comm, no_sen, sen_ft);
    const auto only_sen = compose_tx(zero, plan, sen_ft);
    CHECK((both.data - only_comm.data - only_sen.data).cwiseAbs().maxCoeff() <
          1e-14);
  }

  SUBCASE("measured comm power matches the plan") {
    const double measured = comm.energy() / g.N;
    CHECK(std::abs(measured - plan.p_com(alloc, g)) / plan.p_com(alloc, g) <
          0.02);
  }

  SUBCASE("grid mismatch is rejected") {
    const auto g2 = build_grid(16, 16, 1e6, 0.0, 1e9);
    GridSignal<> other(g2, Domain::FT);
    CHECK_THROWS_AS(compose_tx(other, plan, sen_ft), DomainError);
  }
}

TEST_CASE("Table-I power split: P_com + (M/M_com) r P_com = P_tot") {
  const auto g = build_grid(1024, 128, 1e9 / 1024, 0.102e-6, 30e9);
  Rng rng(5);
  const auto alloc =
      allocate_users(g, 1, 512, 1.0, AllocationScheme::ContiguousBlocks, rng);
  const double p_tot = dbm_to_watt(43.0);
  const double r = 1e-3;
  const double p_com = p_tot / (1.0 + (1024.0 / 512.0) * r);
  PowerPlan<> plan;
  plan.sigma_com = {std::sqrt(p_com / 512.0)};  // eta = 1
  plan.sigma_sen_ft = std::sqrt(r) * plan.sigma_com[0];
  CHECK(plan.p_com(alloc, g) + plan.p_sen(g) ==
        doctest::Approx(p_tot).epsilon(1e-12));
}
