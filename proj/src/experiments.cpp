#include "isac/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <thread>

#include "json.hpp"

#include "isac/channel.hpp"
#include "isac/csvio.hpp"
#include "isac/metrics.hpp"
#include "isac/powalloc.hpp"
#include "isac/receiver.hpp"
#include "isac/version.hpp"
#include "isac/waveform.hpp"

namespace isac {

namespace {

using nlohmann::json;

// Named RNG streams fanned out from the master seed; trial seeds add the
// trial index so the schedule is independent of threading.
enum class Stream : std::uint64_t {
  Allocation = 1,
  CommSymbols = 2,
  Channel = 3,
  Noise = 4,
  Trials = 100,
};

Rng make_rng(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
  return Rng(derive_seed(master, static_cast<std::uint64_t>(stream), index));
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

double default_path_gain(const ScenarioConfig& cfg) {
  return std::sqrt(static_cast<double>(cfg.l_antennas));
}

std::vector<PathSpec> paths_of(const ScenarioConfig& cfg, const UeConfig& ue) {
  std::vector<PathSpec> out;
  for (const auto& p : ue.paths) {
    PathSpec spec;
    spec.variance = friis_path_variance(cfg.f0_hz, p.range_m);
    spec.delay = p.range_m / speed_of_light;
    spec.doppler = cfg.f0_hz * p.velocity_mps / speed_of_light;
    spec.beam_gain = p.beam_gain.value_or(default_path_gain(cfg));
    out.push_back(spec);
  }
  return out;
}

TargetSpec target_of(const ScenarioConfig& cfg, const TargetConfig& t) {
  TargetSpec spec;
  spec.rcs = t.rcs_m2;
  spec.range = t.range_m;
  spec.velocity = t.velocity_mps;
  spec.beam_gain = t.beam_gain.value_or(static_cast<double>(cfg.l_antennas));
  return spec;
}

double ue_gain(const ScenarioConfig& cfg, const UeConfig& ue) {
  double kappa2 = 0.0;
  for (const auto& p : ue.paths) {
    const double zeta = p.beam_gain.value_or(default_path_gain(cfg));
    kappa2 += friis_path_variance(cfg.f0_hz, p.range_m) * zeta * zeta;
  }
  return kappa2;
}

double target_gain(const ScenarioConfig& cfg, const TargetConfig& t) {
  const double zeta = t.beam_gain.value_or(static_cast<double>(cfg.l_antennas));
  return radar_target_variance(t.rcs_m2, cfg.f0_hz, t.range_m) * zeta * zeta;
}

struct ResolvedPower {
  PowerPlan<> plan;
  double p_com = 0.0;
  double sigma_com2 = 0.0;  // per allocated bin
  double sigma_sen2 = 0.0;  // per bin
};

// Fixed-mode split: per-bin sensing power is slaved to the per-bin comm
// power at the configured ratio, and the budget P_com + M sigma_sen^2 =
// P_tot holds exactly.
ResolvedPower resolve_fixed_power(const ScenarioConfig& cfg,
                                  const Allocation& alloc, const GridSpec& grid,
                                  double p_tot_w) {
  ResolvedPower out;
  const double elements = static_cast<double>(alloc.total_elements());
  const double eff_rows = elements / grid.N;  // eta * M_com up to rounding
  out.sigma_com2 =
      p_tot_w / (eff_rows + cfg.power.sensing_ratio * grid.M);
  out.sigma_sen2 = cfg.power.sensing_ratio * out.sigma_com2;
  out.p_com = eff_rows * out.sigma_com2;
  out.plan.sigma_com.assign(alloc.user_sets.size(), std::sqrt(out.sigma_com2));
  out.plan.sigma_sen_ft = std::sqrt(out.sigma_sen2);
  return out;
}

AllocProblem build_alloc_problem(const ScenarioConfig& cfg,
                                 const Allocation& alloc, const GridSpec& grid,
                                 double sigma_z2) {
  AllocProblem pr;
  for (const auto& ue : cfg.ues) pr.kappa2_ue.push_back(ue_gain(cfg, ue));
  for (const auto& t : cfg.targets) pr.kappa2_sen.push_back(target_gain(cfg, t));
  const int q = static_cast<int>(cfg.targets.size());
  pr.chi = Eigen::MatrixXd::Zero(q, q);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) {
      if (a == b) continue;
      const auto ta = target_of(cfg, cfg.targets[a]);
      const auto tb = target_of(cfg, cfg.targets[b]);
      pr.chi(a, b) = coupling_chi(grid, ta.delay() - tb.delay(),
                                  ta.doppler(grid.f0) - tb.doppler(grid.f0));
    }
  // allocate_users guarantees one set per UE, but the problem only needs
  // counts; pad if the scene has more UEs than allocated sets.
  for (std::size_t k = 0; k < cfg.ues.size(); ++k)
    pr.lambda_counts.push_back(
        k < alloc.user_sets.size()
            ? static_cast<double>(alloc.user_sets[k].size())
            : 1.0);
  pr.M = grid.M;
  pr.m_com = alloc.m_com;
  pr.m_ob = alloc.m_ob;
  pr.N = grid.N;
  pr.L = cfg.l_antennas;
  pr.gamma_thr_ft = cfg.power.gamma_thr_ft;
  pr.gamma_thr_dd = cfg.power.gamma_thr_dd;
  pr.aclr_rel = cfg.power.aclr_rel;
  pr.aclr_abs = cfg.power.aclr_abs_w_per_hz;
  pr.delta_f = grid.delta_f;
  pr.sigma_z2 = sigma_z2;
  pr.p_max = cfg.power.p_max_w;
  return pr;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::pair<std::string, std::string>> column_docs;
  std::vector<std::vector<CsvCell>> rows;

  void doc(const std::string& name, const std::string& text) {
    columns.push_back(name);
    column_docs.emplace_back(name, text);
  }
};

// ---------------------------------------------------------------------------
// Individual experiments. Each fills a Table; run_experiment handles files.
// ---------------------------------------------------------------------------

void run_sdnr_vs_range(const ScenarioConfig& cfg, std::uint64_t seed, Table& t) {
  const auto grid = cfg.grid();
  Rng alloc_rng = make_rng(seed, Stream::Allocation);
  const auto alloc = allocate_users(grid, cfg.k, cfg.m_com, cfg.eta, cfg.scheme,
                                    alloc_rng, cfg.hull_offset);
  const auto power = resolve_fixed_power(cfg, alloc, grid, cfg.power.p_tot_w);
  const double sigma_z2 = thermal_noise_power(grid.delta_f, cfg.noise_figure_db);
  const NoiseSpec noise{sigma_z2, cfg.l_antennas};

  std::vector<double> ranges = cfg.experiment.ranges_m;
  if (ranges.empty())
    for (double r = 5.0; r <= 300.0 * (1.0 + 1e-9); r *= std::pow(300.0 / 5.0, 1.0 / 24.0))
      ranges.push_back(r);

  t.doc("range_m", "BS-target (and BS-UE) range in meters");
  t.doc("sensing_sdnr_db", "DD-domain sensing SDNR bound at the BS");
  t.doc("sensing_snr_cancelled_db",
        "same with genie OFDM cancellation (comm term removed)");
  t.doc("ue_sdnr_db", "FT-domain communication SDNR bound at the UE");
  t.doc("ue_rate_bps_hz", "achievable rate from ue_sdnr with CP loss");

  for (double r : ranges) {
    ScenarioConfig at_range = cfg;
    for (auto& tc : at_range.targets) tc.range_m = r;
    for (auto& ue : at_range.ues)
      for (auto& p : ue.paths) p.range_m = r;
    std::vector<TargetSpec> targets;
    for (const auto& tc : at_range.targets) targets.push_back(target_of(cfg, tc));
    const auto sdnr =
        sensing_sdnr<double>(targets, power.plan, alloc, grid, noise, false);
    const auto snr =
        sensing_sdnr<double>(targets, power.plan, alloc, grid, noise, true);
    const double kappa2 = ue_gain(at_range, at_range.ues.front());
    const double ue = ue_sdnr_bound(kappa2, power.sigma_com2, power.sigma_sen2,
                                    sigma_z2, false);
    t.rows.push_back({r, linear_to_db(sdnr.front().bound),
                      linear_to_db(snr.front().bound), linear_to_db(ue),
                      achievable_rate(ue, grid)});
  }
}

CrbSweepSetup sweep_setup(const ScenarioConfig& cfg, const GridSpec& grid) {
  CrbSweepSetup setup;
  setup.sensing_ratio = cfg.power.sensing_ratio;
  setup.p_tot = cfg.power.p_tot_w;
  // The sensing receiver noise after Rx BF is L sigma_z^2 per bin.
  setup.sigma_z2 =
      thermal_noise_power(grid.delta_f, cfg.noise_figure_db) * cfg.l_antennas;
  const double b2 = target_gain(cfg, cfg.targets.front());
  setup.beta1 = std::sqrt(b2);
  setup.beta2 = 0.0;
  setup.scheme = cfg.scheme;
  return setup;
}

void run_crb_ratio_eta(const ScenarioConfig& cfg, std::uint64_t, Table& t) {
  const auto grid = cfg.grid();
  auto setup = sweep_setup(cfg, grid);
  std::vector<double> fracs = cfg.experiment.mcom_fracs;
  if (fracs.empty()) fracs = {0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<double> etas = cfg.experiment.etas;
  if (etas.empty())
    for (double e = 0.1; e <= 1.0 + 1e-9; e += 0.1) etas.push_back(e);

  t.doc("mcom_frac", "communication bandwidth fraction M_com/M");
  t.doc("eta", "occupancy of the communication hull");
  t.doc("rootcrb_ratio_db",
        "root CRB on delay, OFDM over dual-domain, single target, dB");
  for (const auto& pt : crb_ratio_eta_sweep(grid, fracs, etas, setup))
    t.rows.push_back({pt.mcom_frac, pt.eta, pt.ratio_db});
}

void run_crb_ratio_two_targets(const ScenarioConfig& cfg, std::uint64_t,
                               Table& t) {
  const auto grid = cfg.grid();
  auto setup = sweep_setup(cfg, grid);
  setup.beta2 = setup.beta1;  // two equally strong targets
  std::vector<double> fracs = cfg.experiment.mcom_fracs;
  if (fracs.empty()) fracs = {0.1, 0.2, 0.5};
  std::vector<double> seps = cfg.experiment.separations_bins;
  if (seps.empty())
    for (double s = 0.1; s <= 3.0 + 1e-9; s += 0.1) seps.push_back(s);

  t.doc("mcom_frac", "communication bandwidth fraction M_com/M");
  t.doc("separation_bins", "(tau2 - tau1) / delta_tau");
  t.doc("rootcrb_ratio_db",
        "root CRB on tau_1, OFDM over dual-domain, two equal targets, dB");
  for (const auto& pt : crb_ratio_two_target_sweep(grid, fracs, seps, setup))
    t.rows.push_back({pt.mcom_frac, pt.separation_bins, pt.ratio_db});
}

void run_mter_sweep(const ScenarioConfig& cfg, std::uint64_t seed, Table& t) {
  const auto grid = cfg.grid();
  const auto variant = cfg.experiment.mter_variant;
  std::vector<double> fracs = cfg.experiment.mcom_fracs;
  if (fracs.empty()) fracs = {0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<double> etas = cfg.experiment.etas;
  if (etas.empty()) etas = {0.2, 0.35, 0.5, 0.7, 1.0};

  t.doc("waveform", "dual-domain, otfs, or ofdm");
  t.doc("mcom_frac", "M_com/M (1 for dual-domain and otfs)");
  t.doc("eta", "occupancy (1 for dual-domain and otfs)");
  t.doc("mter", "mainlobe-to-total-energy ratio");

  const auto flat = flat_power(grid, 1.0);
  t.rows.push_back({std::string("dual-domain"), 1.0, 1.0,
                    mter_waveform(flat, grid, WaveformKind::DualDomain, variant)});
  t.rows.push_back({std::string("otfs"), 1.0, 1.0,
                    mter_waveform(flat, grid, WaveformKind::Otfs, variant)});
  int draw = 0;
  for (double frac : fracs) {
    const int m_com = std::max(1, static_cast<int>(std::llround(frac * grid.M)));
    for (double eta : etas) {
      Eigen::MatrixXd p;
      if (eta >= 1.0 - 1e-12) {
        p = banded_power(grid, m_com, 1.0);
      } else {
        // A concrete seeded draw: MTER of a sparse allocation is a property
        // of the realized mask, not of its expectation.
        Rng rng = make_rng(seed, Stream::Allocation, ++draw);
        const auto alloc = allocate_users(grid, 1, m_com, eta,
                                          cfg.scheme, rng, cfg.hull_offset);
        p = Eigen::MatrixXd::Zero(grid.M, grid.N);
        for (const auto& idx : alloc.user_sets.front())
          p(grid.row_of(idx.m), grid.col_of(idx.n)) = 1.0;
      }
      t.rows.push_back({std::string("ofdm"), frac, eta,
                        mter_waveform(p, grid, WaveformKind::Ofdm, variant)});
    }
  }
}

void run_ambiguity_slice(const ScenarioConfig& cfg, std::uint64_t, Table& t) {
  const auto grid = cfg.grid();
  const auto res = resolution_of(grid);
  std::vector<double> fracs = cfg.experiment.mcom_fracs;
  if (fracs.empty()) fracs = {0.1, 0.3, 0.5};
  const int points = cfg.experiment.slice_points;
  Eigen::VectorXd taus(points), zero(1);
  zero(0) = 0.0;
  for (int i = 0; i < points; ++i)
    taus(i) = cfg.experiment.tau_max_bins * res.delta_tau * i / (points - 1);

  t.doc("waveform", "dual-domain or ofdm");
  t.doc("mcom_frac", "M_com/M (1 for dual-domain)");
  t.doc("tau_bins", "delay offset in units of delta_tau");
  t.doc("normalized_db", "20 log10(|chi(tau, 0)| / |chi(0, 0)|)");

  auto emit = [&](const std::string& name, double frac,
                  const Eigen::MatrixXd& p, WaveformKind kind) {
    const auto map = ambiguity(p, grid, kind, taus, zero);
    const double peak = map.values(0, 0);
    for (int i = 0; i < points; ++i) {
      const double norm = map.values(i, 0) / peak;
      t.rows.push_back({name, frac, taus(i) / res.delta_tau,
                        20.0 * std::log10(std::max(norm, 1e-12))});
    }
  };
  emit("dual-domain", 1.0, flat_power(grid, 1.0), WaveformKind::DualDomain);
  for (double frac : fracs) {
    const int m_com = std::max(1, static_cast<int>(std::llround(frac * grid.M)));
    emit("ofdm", frac, banded_power(grid, m_com, 1.0), WaveformKind::Ofdm);
  }
}

void run_rate_vs_power(const ScenarioConfig& cfg, std::uint64_t seed, Table& t) {
  const auto grid = cfg.grid();
  Rng alloc_rng = make_rng(seed, Stream::Allocation);
  const auto alloc = allocate_users(grid, cfg.k, cfg.m_com, cfg.eta, cfg.scheme,
                                    alloc_rng, cfg.hull_offset);
  const double sigma_z2 = thermal_noise_power(grid.delta_f, cfg.noise_figure_db);

  std::vector<double> powers = cfg.experiment.p_tot_dbm_axis;
  if (powers.empty())
    for (double p = 20.0; p <= 46.0 + 1e-9; p += 1.0) powers.push_back(p);
  std::vector<double> ranges = cfg.experiment.ranges_m;
  if (ranges.empty()) ranges = {10.0, 60.0};

  t.doc("p_tot_dbm", "total emitted power");
  t.doc("range_m", "BS-UE range");
  t.doc("rate_ofdm_bps_hz", "pure OFDM rate, all power to communication");
  t.doc("rate_dual_bps_hz", "dual-domain rate with the configured split");
  t.doc("rate_dual_cancelled_bps_hz", "dual-domain rate with UE-side cancellation");
  t.doc("penalty_bps_hz", "rate_ofdm - rate_dual");

  for (double r : ranges) {
    ScenarioConfig at_range = cfg;
    for (auto& ue : at_range.ues)
      for (auto& p : ue.paths) p.range_m = r;
    const double kappa2 = ue_gain(at_range, at_range.ues.front());
    for (double p_dbm : powers) {
      const double p_tot = dbm_to_watt(p_dbm);
      const auto dual = resolve_fixed_power(cfg, alloc, grid, p_tot);
      // Pure OFDM: the whole budget goes to the same allocation.
      const double sigma_ofdm2 =
          p_tot / (static_cast<double>(alloc.total_elements()) / grid.N);
      const double c_ofdm =
          achievable_rate(ue_sdnr_bound(kappa2, sigma_ofdm2, 0.0, sigma_z2), grid);
      const double c_dual = achievable_rate(
          ue_sdnr_bound(kappa2, dual.sigma_com2, dual.sigma_sen2, sigma_z2),
          grid);
      const double c_cancel = achievable_rate(
          ue_sdnr_bound(kappa2, dual.sigma_com2, dual.sigma_sen2, sigma_z2, true),
          grid);
      t.rows.push_back(
          {p_dbm, r, c_ofdm, c_dual, c_cancel, c_ofdm - c_dual});
    }
  }
}

void run_montecarlo_estimation(const ScenarioConfig& cfg, std::uint64_t seed,
                               Table& t, int threads,
                               const std::string& detections_path) {
  const auto grid = cfg.grid();
  const auto res = resolution_of(grid);
  const double sigma_z2 = thermal_noise_power(grid.delta_f, cfg.noise_figure_db);
  const NoiseSpec noise{sigma_z2, cfg.l_antennas};
  const double noise_dd = sigma_z2 * cfg.l_antennas;  // per DD bin

  std::vector<double> snrs = cfg.experiment.snr_post_db;
  if (snrs.empty()) snrs = {15.0, 20.0, 25.0, 30.0};
  const int trials = cfg.experiment.trials;
  const int l_true = cfg.experiment.mc_delay_bin;
  const int p_true = cfg.experiment.mc_doppler_bin;
  if (l_true > grid.M - 1 || p_true < -grid.N / 2 || p_true > grid.N / 2 - 1)
    throw ConfigError("montecarlo-estimation: target bin outside the grid");

  // Deterministic scattering amplitude at the configured scene gain; only
  // the noise is redrawn per trial.
  const double kappa2 = target_gain(cfg, cfg.targets.front());
  TargetSpec target = target_of(cfg, cfg.targets.front());
  target.range = l_true * res.delta_tau * speed_of_light / 2.0;
  target.velocity = p_true * res.delta_nu * speed_of_light / (2.0 * grid.f0);
  target.beam_gain = 1.0;  // gain carried by beta below
  const std::complex<double> beta = std::sqrt(kappa2);

  t.doc("snr_post_db", "post-processing-gain peak SNR, MN kappa^2 sigma_sen^2 / (L sigma_z^2)");
  t.doc("trials", "Monte Carlo trials");
  t.doc("rmse_tau_s", "root mean square delay error");
  t.doc("rootcrb_tau_s", "single-target root CRB on delay");
  t.doc("rmse_nu_hz", "root mean square Doppler error");
  t.doc("rootcrb_nu_hz", "single-target root CRB on Doppler");
  t.doc("detection_rate", "fraction of trials with a detection");

  CsvWriter detections(detections_path,
                       {"snr_post_db", "trial", "tau_s", "nu_hz", "range_m",
                        "velocity_mps", "peak_db"});

  for (double snr_db : snrs) {
    // sigma_sen so that MN kappa^2 sigma_sen^2 = SNR * L sigma_z^2.
    const double mn = static_cast<double>(grid.M) * grid.N;
    const double sigma_sen2 = db_to_linear(snr_db) * noise_dd / (mn * kappa2);
    PowerPlan<> plan;
    plan.sigma_sen_ft = std::sqrt(sigma_sen2);
    GridSignal<> zero_comm(grid, Domain::FT);
    const auto tx = compose_tx(
        zero_comm, plan,
        dd_to_ft(synth_sensing_dd<double>(grid, cfg.impulse_delay_bin,
                                          cfg.impulse_doppler_bin)));
    const auto h = sensing_channel_ft_fixed<double>(grid, {target}, {beta});
    const auto y_clean = apply_channel(h, tx);

    std::vector<double> err_tau(trials, 0.0), err_nu(trials, 0.0);
    std::vector<Detection> first_peak(trials);
    std::vector<int> detected(trials, 0);
    parallel_for(trials, threads, [&](int trial) {
      Rng rng = make_rng(seed, Stream::Trials, static_cast<std::uint64_t>(trial));
      const auto y = add_noise(y_clean, noise, RxSide::BS, rng);
      PeriodogramOptions opts;
      opts.q_max = 1;
      opts.gamma_thr_db = 10.0;
      opts.refine = cfg.experiment.refine;
      const auto est = periodogram_estimate(bs_dd_receive(y),
                                            cfg.impulse_delay_bin,
                                            cfg.impulse_doppler_bin, opts);
      if (est.detections.empty()) return;
      detected[trial] = 1;
      first_peak[trial] = est.detections[0];
      err_tau[trial] = est.detections[0].tau_s - l_true * res.delta_tau;
      err_nu[trial] = est.detections[0].nu_hz - p_true * res.delta_nu;
    });

    int hits = 0;
    double se_tau = 0.0, se_nu = 0.0;
    for (int i = 0; i < trials; ++i) {
      hits += detected[i];
      se_tau += err_tau[i] * err_tau[i];
      se_nu += err_nu[i] * err_nu[i];
      if (detected[i]) {
        const auto& d = first_peak[i];
        detections.write_row({snr_db, static_cast<long long>(i), d.tau_s,
                              d.nu_hz, 0.5 * speed_of_light * d.tau_s,
                              0.5 * speed_of_light / grid.f0 * d.nu_hz,
                              linear_to_db(d.peak_power)});
      }
    }
    const double rmse_tau = hits ? std::sqrt(se_tau / hits) : 0.0;
    const double rmse_nu = hits ? std::sqrt(se_nu / hits) : 0.0;

    const auto rep = fim_two_targets(
        flat_power(grid, sigma_sen2), grid, beta, 0.0, target.delay(), 0.0,
        target.doppler(grid.f0), 0.0, NoiseModelSpec::white(noise_dd));
    t.rows.push_back({snr_db, static_cast<long long>(trials), rmse_tau,
                      std::sqrt(rep.crb_tau(0, 0)), rmse_nu,
                      std::sqrt(rep.crb_nu(0, 0)),
                      static_cast<double>(hits) / trials});
  }
}

bool run_power_allocation(const ScenarioConfig& cfg, std::uint64_t seed,
                          Table& t, std::string& message) {
  const auto grid = cfg.grid();
  Rng alloc_rng = make_rng(seed, Stream::Allocation);
  const auto alloc = allocate_users(grid, cfg.k, cfg.m_com, cfg.eta, cfg.scheme,
                                    alloc_rng, cfg.hull_offset);
  const double sigma_z2 = thermal_noise_power(grid.delta_f, cfg.noise_figure_db);
  auto pr = build_alloc_problem(cfg, alloc, grid, sigma_z2);

  t.doc("quantity", "allocation result entry");
  t.doc("value_w", "value in watts (per resource element for amplitudes)");
  t.doc("value_dbm", "same in dBm");

  const auto sol = solve(pr);
  auto emit = [&](const std::string& name, double w) {
    t.rows.push_back({name, w, w > 0.0 ? watt_to_dbm(w)
                                       : -std::numeric_limits<double>::infinity()});
  };
  if (sol.status != AllocSolution::Status::Optimal) {
    message = "infeasible: " + sol.certificate;
    return false;
  }
  for (std::size_t k = 0; k < sol.p_com_k.size(); ++k)
    emit("p_com_ue" + std::to_string(k), sol.p_com_k[k]);
  emit("p_sen_per_bin", sol.p_sen);
  emit("p_ib", sol.p_ib);
  emit("p_ob", sol.p_ob);
  emit("p_tot", sol.p_tot);
  std::string tight;
  for (const auto& name : sol.tight_constraints)
    tight += (tight.empty() ? "" : ";") + name;
  message = "optimal; tight: " + tight;
  return true;
}

void dump_iq(const ScenarioConfig& cfg, std::uint64_t seed,
             const std::string& path) {
  const auto grid = cfg.grid();
  Rng alloc_rng = make_rng(seed, Stream::Allocation);
  const auto alloc = allocate_users(grid, cfg.k, cfg.m_com, cfg.eta, cfg.scheme,
                                    alloc_rng, cfg.hull_offset);
  const auto power = resolve_fixed_power(cfg, alloc, grid, cfg.power.p_tot_w);
  Rng sym_rng = make_rng(seed, Stream::CommSymbols);
  const auto comm = synth_comm(alloc, grid, 16, power.plan, sym_rng);
  const auto tx = compose_tx(
      comm, power.plan,
      dd_to_ft(synth_sensing_dd<double>(grid, cfg.impulse_delay_bin,
                                        cfg.impulse_doppler_bin)));
  const auto stream = to_time_domain(tx);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("dump-iq: cannot open " + path);
  for (const auto& s : stream) {
    const double iq[2] = {s.real(), s.imag()};
    out.write(reinterpret_cast<const char*>(iq), sizeof(iq));
  }
}

}  // namespace

RunResult run_experiment(const ScenarioConfig& config, const RunOptions& options) {
  ScenarioConfig cfg = config;
  if (options.trials_override) cfg.experiment.trials = *options.trials_override;
  const std::uint64_t seed = options.seed_override.value_or(cfg.seed);
  cfg.seed = seed;

  std::filesystem::create_directories(options.out_dir);
  const std::string base =
      (std::filesystem::path(options.out_dir) / cfg.experiment.name).string();

  Table table;
  RunResult result;
  result.csv_path = base + ".csv";
  result.sidecar_path = base + ".meta.json";

  const auto& name = cfg.experiment.name;
  if (name == "sdnr-vs-range") {
    run_sdnr_vs_range(cfg, seed, table);
  } else if (name == "crb-ratio-eta") {
    run_crb_ratio_eta(cfg, seed, table);
  } else if (name == "crb-ratio-two-targets") {
    run_crb_ratio_two_targets(cfg, seed, table);
  } else if (name == "mter-sweep") {
    run_mter_sweep(cfg, seed, table);
  } else if (name == "ambiguity-slice") {
    run_ambiguity_slice(cfg, seed, table);
  } else if (name == "rate-vs-power") {
    run_rate_vs_power(cfg, seed, table);
  } else if (name == "montecarlo-estimation") {
    run_montecarlo_estimation(cfg, seed, table, options.threads,
                              base + "_detections.csv");
    result.message = "detections: " + base + "_detections.csv";
  } else if (name == "power-allocation") {
    result.infeasible = !run_power_allocation(cfg, seed, table, result.message);
  } else {
    throw ConfigError("unknown experiment: " + name);
  }

  if (options.dump_iq_path) dump_iq(cfg, seed, *options.dump_iq_path);

  {
    CsvWriter csv(result.csv_path, table.columns);
    for (const auto& row : table.rows) csv.write_row(row);
  }
  {
    json columns = json::object();
    for (const auto& [col, doc] : table.column_docs) columns[col] = doc;
    json meta = {
        {"experiment", name},
        {"version", version_string},
        {"master_seed", seed},
        {"seed_derivation",
         "stream seeds are splitmix64(splitmix64(master ^ stream*c) + index); "
         "trial i uses stream 100, index i"},
        {"columns", columns},
        {"resolved_config", json::parse(scenario_to_json(cfg))},
        {"status", result.infeasible ? "infeasible" : "ok"},
    };
    if (!result.message.empty()) meta["message"] = result.message;
    std::ofstream out(result.sidecar_path, std::ios::binary);
    out << meta.dump(2) << '\n';
  }
  return result;
}

}  // namespace isac
