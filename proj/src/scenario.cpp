#include "isac/scenario.hpp"

#include <cmath>
#include <set>

#include "json.hpp"

#include "isac/constants.hpp"
#include "isac/errors.hpp"

namespace isac {

namespace {

using nlohmann::json;

// Collects schema problems with full key paths while walking the document.
struct Walker {
  std::vector<std::string>* errors;

  void fail(const std::string& path, const std::string& message) const {
    errors->push_back(path + ": " + message);
  }

  bool object(const json& j, const std::string& path,
              const std::set<std::string>& allowed) const {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    for (const auto& [key, value] : j.items()) {
      (void)value;
      if (!allowed.count(key)) fail(path + "." + key, "unknown key");
    }
    return true;
  }

  template <typename T>
  void number(const json& j, const std::string& path, const char* key, T& out,
              double lo = -1e300, double hi = 1e300) const {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_number()) {
      fail(path + "." + key, "expected a number");
      return;
    }
    const double x = v.get<double>();
    if (x < lo || x > hi) {
      fail(path + "." + key, "out of range [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "]");
      return;
    }
    out = static_cast<T>(x);
  }

  void integer(const json& j, const std::string& path, const char* key,
               int& out, long long lo, long long hi) const {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_number_integer()) {
      fail(path + "." + key, "expected an integer");
      return;
    }
    const long long x = v.get<long long>();
    if (x < lo || x > hi) {
      fail(path + "." + key, "out of range");
      return;
    }
    out = static_cast<int>(x);
  }

  void number_list(const json& j, const std::string& path, const char* key,
                   std::vector<double>& out) const {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_array()) {
      fail(path + "." + key, "expected an array of numbers");
      return;
    }
    out.clear();
    for (const auto& item : v) {
      if (!item.is_number()) {
        fail(path + "." + key, "expected an array of numbers");
        return;
      }
      out.push_back(item.get<double>());
    }
  }
};

ScenarioConfig parse_into(const json& root, std::vector<std::string>& errors) {
  ScenarioConfig cfg;
  Walker w{&errors};
  if (!w.object(root, "$",
                {"grid", "allocation", "scene", "power", "noise", "experiment"}))
    return cfg;

  if (root.contains("grid")) {
    const auto& g = root.at("grid");
    if (w.object(g, "grid", {"m", "n", "delta_f_hz", "t_cp_s", "f0_hz"})) {
      w.integer(g, "grid", "m", cfg.m, 2, 1 << 20);
      w.integer(g, "grid", "n", cfg.n, 2, 1 << 20);
      w.number(g, "grid", "delta_f_hz", cfg.delta_f_hz, 1e-9, 1e12);
      w.number(g, "grid", "t_cp_s", cfg.t_cp_s, 0.0, 1.0);
      w.number(g, "grid", "f0_hz", cfg.f0_hz, 1e-9, 1e15);
      if (g.contains("delta_f_hz") && g.at("delta_f_hz").is_number() &&
          g.at("delta_f_hz").get<double>() <= 0.0)
        w.fail("grid.delta_f_hz", "must be positive");
    }
  }

  cfg.m_com = cfg.m / 2;
  if (root.contains("allocation")) {
    const auto& a = root.at("allocation");
    if (w.object(a, "allocation",
                 {"k", "m_com", "eta", "scheme", "hull_offset", "seed"})) {
      w.integer(a, "allocation", "k", cfg.k, 1, 1 << 20);
      w.integer(a, "allocation", "m_com", cfg.m_com, 1, 1 << 20);
      w.number(a, "allocation", "eta", cfg.eta, 1e-12, 1.0);
      w.integer(a, "allocation", "hull_offset", cfg.hull_offset, -(1 << 20),
                1 << 20);
      if (a.contains("seed")) {
        if (!a.at("seed").is_number_unsigned())
          w.fail("allocation.seed", "expected a nonnegative integer");
        else
          cfg.seed = a.at("seed").get<std::uint64_t>();
      }
      if (a.contains("scheme")) {
        const auto s = a.at("scheme");
        if (!s.is_string())
          w.fail("allocation.scheme", "expected a string");
        else if (s.get<std::string>() == "contiguous-blocks")
          cfg.scheme = AllocationScheme::ContiguousBlocks;
        else if (s.get<std::string>() == "random-uniform")
          cfg.scheme = AllocationScheme::RandomUniform;
        else
          w.fail("allocation.scheme",
                 "must be contiguous-blocks or random-uniform");
      }
    }
  }

  if (root.contains("scene")) {
    const auto& s = root.at("scene");
    if (w.object(s, "scene", {"ues", "targets", "sensing_impulse"})) {
      if (s.contains("ues")) {
        if (!s.at("ues").is_array()) {
          w.fail("scene.ues", "expected an array");
        } else {
          int ue_idx = 0;
          for (const auto& ue : s.at("ues")) {
            const std::string path = "scene.ues[" + std::to_string(ue_idx++) + "]";
            UeConfig uc;
            if (!w.object(ue, path, {"paths"})) continue;
            if (!ue.contains("paths") || !ue.at("paths").is_array() ||
                ue.at("paths").empty()) {
              w.fail(path + ".paths", "each UE needs at least one path");
              continue;
            }
            int p_idx = 0;
            for (const auto& p : ue.at("paths")) {
              const std::string ppath = path + ".paths[" + std::to_string(p_idx++) + "]";
              PathConfig pc;
              if (!w.object(p, ppath, {"range_m", "velocity_mps", "beam_gain"}))
                continue;
              w.number(p, ppath, "range_m", pc.range_m, 1e-3, 1e7);
              w.number(p, ppath, "velocity_mps", pc.velocity_mps, -3e8, 3e8);
              if (p.contains("beam_gain")) {
                double bg = 0.0;
                w.number(p, ppath, "beam_gain", bg, 0.0, 1e12);
                pc.beam_gain = bg;
              }
              uc.paths.push_back(pc);
            }
            cfg.ues.push_back(uc);
          }
        }
      }
      if (s.contains("targets")) {
        if (!s.at("targets").is_array()) {
          w.fail("scene.targets", "expected an array");
        } else {
          int t_idx = 0;
          for (const auto& t : s.at("targets")) {
            const std::string tpath = "scene.targets[" + std::to_string(t_idx++) + "]";
            TargetConfig tc;
            if (!w.object(t, tpath,
                          {"rcs_m2", "range_m", "velocity_mps", "beam_gain"}))
              continue;
            w.number(t, tpath, "rcs_m2", tc.rcs_m2, 1e-12, 1e9);
            w.number(t, tpath, "range_m", tc.range_m, 1e-3, 1e7);
            w.number(t, tpath, "velocity_mps", tc.velocity_mps, -3e8, 3e8);
            if (t.contains("beam_gain")) {
              double bg = 0.0;
              w.number(t, tpath, "beam_gain", bg, 0.0, 1e12);
              tc.beam_gain = bg;
            }
            cfg.targets.push_back(tc);
          }
        }
      }
      if (s.contains("sensing_impulse")) {
        const auto& imp = s.at("sensing_impulse");
        if (w.object(imp, "scene.sensing_impulse", {"delay_bin", "doppler_bin"})) {
          w.integer(imp, "scene.sensing_impulse", "delay_bin",
                    cfg.impulse_delay_bin, 0, 1 << 20);
          w.integer(imp, "scene.sensing_impulse", "doppler_bin",
                    cfg.impulse_doppler_bin, -(1 << 20), 1 << 20);
        }
      }
    }
  }

  if (root.contains("power")) {
    const auto& p = root.at("power");
    if (w.object(p, "power",
                 {"mode", "p_tot_dbm", "sensing_ratio_db", "gamma_thr_ft_db",
                  "gamma_thr_dd_db", "aclr_rel_db", "aclr_abs_dbm_per_mhz",
                  "p_max_dbm"})) {
      if (p.contains("mode")) {
        const auto mode = p.at("mode");
        if (!mode.is_string())
          w.fail("power.mode", "expected a string");
        else if (mode.get<std::string>() == "fixed")
          cfg.power.mode = PowerConfig::Mode::Fixed;
        else if (mode.get<std::string>() == "solve")
          cfg.power.mode = PowerConfig::Mode::Solve;
        else
          w.fail("power.mode", "must be fixed or solve");
      }
      double tmp = 0.0;
      if (p.contains("p_tot_dbm")) {
        w.number(p, "power", "p_tot_dbm", tmp, -100.0, 100.0);
        cfg.power.p_tot_w = dbm_to_watt(tmp);
      }
      if (p.contains("sensing_ratio_db")) {
        w.number(p, "power", "sensing_ratio_db", tmp, -200.0, 50.0);
        cfg.power.sensing_ratio = db_to_linear(tmp);
      }
      if (p.contains("gamma_thr_ft_db")) {
        w.number(p, "power", "gamma_thr_ft_db", tmp, -50.0, 100.0);
        cfg.power.gamma_thr_ft = db_to_linear(tmp);
      }
      if (p.contains("gamma_thr_dd_db")) {
        w.number(p, "power", "gamma_thr_dd_db", tmp, -50.0, 100.0);
        cfg.power.gamma_thr_dd = db_to_linear(tmp);
      }
      if (p.contains("aclr_rel_db")) {
        w.number(p, "power", "aclr_rel_db", tmp, 0.0, 200.0);
        cfg.power.aclr_rel = db_to_linear(tmp);
      }
      if (p.contains("aclr_abs_dbm_per_mhz")) {
        w.number(p, "power", "aclr_abs_dbm_per_mhz", tmp, -200.0, 100.0);
        cfg.power.aclr_abs_w_per_hz = dbm_to_watt(tmp) / 1e6;
      }
      if (p.contains("p_max_dbm")) {
        w.number(p, "power", "p_max_dbm", tmp, -100.0, 100.0);
        cfg.power.p_max_w = dbm_to_watt(tmp);
      }
    }
  }

  if (root.contains("noise")) {
    const auto& nz = root.at("noise");
    if (w.object(nz, "noise", {"noise_figure_db", "l_antennas"})) {
      w.number(nz, "noise", "noise_figure_db", cfg.noise_figure_db, -10.0, 60.0);
      w.integer(nz, "noise", "l_antennas", cfg.l_antennas, 1, 1 << 20);
    }
  }

  if (!root.contains("experiment")) {
    w.fail("experiment", "required block is missing");
  } else {
    const auto& e = root.at("experiment");
    if (w.object(e, "experiment",
                 {"name", "trials", "ranges_m", "mcom_fracs", "etas",
                  "separations_bins", "p_tot_dbm_axis", "snr_post_db",
                  "tau_max_bins", "slice_points", "mter_variant", "refine",
                  "mc_delay_bin", "mc_doppler_bin"})) {
      if (!e.contains("name") || !e.at("name").is_string()) {
        w.fail("experiment.name", "required string");
      } else {
        cfg.experiment.name = e.at("name").get<std::string>();
        static const std::set<std::string> known = {
            "sdnr-vs-range",        "crb-ratio-eta",
            "crb-ratio-two-targets", "mter-sweep",
            "ambiguity-slice",      "rate-vs-power",
            "montecarlo-estimation", "power-allocation"};
        if (!known.count(cfg.experiment.name))
          w.fail("experiment.name", "unknown experiment: " + cfg.experiment.name);
      }
      w.integer(e, "experiment", "trials", cfg.experiment.trials, 1, 1 << 24);
      w.number_list(e, "experiment", "ranges_m", cfg.experiment.ranges_m);
      w.number_list(e, "experiment", "mcom_fracs", cfg.experiment.mcom_fracs);
      w.number_list(e, "experiment", "etas", cfg.experiment.etas);
      w.number_list(e, "experiment", "separations_bins",
                    cfg.experiment.separations_bins);
      w.number_list(e, "experiment", "p_tot_dbm_axis",
                    cfg.experiment.p_tot_dbm_axis);
      w.number_list(e, "experiment", "snr_post_db", cfg.experiment.snr_post_db);
      w.number(e, "experiment", "tau_max_bins", cfg.experiment.tau_max_bins,
               0.1, 1e6);
      w.integer(e, "experiment", "slice_points", cfg.experiment.slice_points, 9,
                1 << 20);
      w.integer(e, "experiment", "mc_delay_bin", cfg.experiment.mc_delay_bin, 0,
                1 << 20);
      w.integer(e, "experiment", "mc_doppler_bin", cfg.experiment.mc_doppler_bin,
                -(1 << 20), 1 << 20);
      if (e.contains("refine")) {
        if (!e.at("refine").is_boolean())
          w.fail("experiment.refine", "expected a boolean");
        else
          cfg.experiment.refine = e.at("refine").get<bool>();
      }
      if (e.contains("mter_variant")) {
        const auto& v = e.at("mter_variant");
        if (!v.is_string())
          w.fail("experiment.mter_variant", "expected a string");
        else if (v.get<std::string>() == "sqrt")
          cfg.experiment.mter_variant = MterVariant::SqrtRatio;
        else if (v.get<std::string>() == "energy")
          cfg.experiment.mter_variant = MterVariant::EnergyRatio;
        else
          w.fail("experiment.mter_variant", "must be sqrt or energy");
      }
    }
  }

  // Scene defaults: one UE on a LOS path and one target, both at 50 m.
  if (cfg.ues.empty()) cfg.ues.push_back(UeConfig{{PathConfig{}}});
  if (cfg.targets.empty()) cfg.targets.push_back(TargetConfig{});
  return cfg;
}

void physics_checks(const ScenarioConfig& cfg, ValidationReport& report) {
  // Allocation feasibility: at least one resource element per UE.
  const double elements = cfg.eta * cfg.m_com * cfg.n;
  if (std::llround(elements) < cfg.k)
    report.errors.push_back(
        "allocation: eta*m_com*n < k (fewer resource elements than UEs)");
  if (cfg.m_com > cfg.m)
    report.errors.push_back("allocation.m_com: exceeds grid.m");
  if (cfg.impulse_delay_bin > cfg.m - 1)
    report.errors.push_back("scene.sensing_impulse.delay_bin: exceeds M-1");
  if (cfg.impulse_doppler_bin < -cfg.n / 2 ||
      cfg.impulse_doppler_bin > cfg.n / 2 - 1)
    report.errors.push_back(
        "scene.sensing_impulse.doppler_bin: outside [-N/2, N/2-1]");

  // CP must cover the two-way echo span for DFT sensing to stay valid.
  double r_max = 0.0;
  for (const auto& t : cfg.targets) r_max = std::max(r_max, t.range_m);
  if (r_max > 0.0 && 2.0 * r_max / speed_of_light > cfg.t_cp_s)
    report.warnings.push_back(
        "cp: 2*R_max/c = " + std::to_string(2.0 * r_max / speed_of_light) +
        " s exceeds t_cp_s = " + std::to_string(cfg.t_cp_s) +
        " s; echoes spill past the cyclic prefix");
}

json scenario_json(const ScenarioConfig& c) {
  json scene_ues = json::array();
  for (const auto& ue : c.ues) {
    json paths = json::array();
    for (const auto& p : ue.paths) {
      json jp = {{"range_m", p.range_m}, {"velocity_mps", p.velocity_mps}};
      if (p.beam_gain) jp["beam_gain"] = *p.beam_gain;
      paths.push_back(jp);
    }
    scene_ues.push_back({{"paths", paths}});
  }
  json scene_targets = json::array();
  for (const auto& t : c.targets) {
    json jt = {{"rcs_m2", t.rcs_m2},
               {"range_m", t.range_m},
               {"velocity_mps", t.velocity_mps}};
    if (t.beam_gain) jt["beam_gain"] = *t.beam_gain;
    scene_targets.push_back(jt);
  }
  json e = {{"name", c.experiment.name},
            {"trials", c.experiment.trials},
            {"tau_max_bins", c.experiment.tau_max_bins},
            {"slice_points", c.experiment.slice_points},
            {"mter_variant",
             c.experiment.mter_variant == MterVariant::SqrtRatio ? "sqrt"
                                                                 : "energy"},
            {"refine", c.experiment.refine},
            {"mc_delay_bin", c.experiment.mc_delay_bin},
            {"mc_doppler_bin", c.experiment.mc_doppler_bin}};
  if (!c.experiment.ranges_m.empty()) e["ranges_m"] = c.experiment.ranges_m;
  if (!c.experiment.mcom_fracs.empty()) e["mcom_fracs"] = c.experiment.mcom_fracs;
  if (!c.experiment.etas.empty()) e["etas"] = c.experiment.etas;
  if (!c.experiment.separations_bins.empty())
    e["separations_bins"] = c.experiment.separations_bins;
  if (!c.experiment.p_tot_dbm_axis.empty())
    e["p_tot_dbm_axis"] = c.experiment.p_tot_dbm_axis;
  if (!c.experiment.snr_post_db.empty()) e["snr_post_db"] = c.experiment.snr_post_db;

  return json{
      {"grid",
       {{"m", c.m},
        {"n", c.n},
        {"delta_f_hz", c.delta_f_hz},
        {"t_cp_s", c.t_cp_s},
        {"f0_hz", c.f0_hz}}},
      {"allocation",
       {{"k", c.k},
        {"m_com", c.m_com},
        {"eta", c.eta},
        {"scheme", c.scheme == AllocationScheme::ContiguousBlocks
                       ? "contiguous-blocks"
                       : "random-uniform"},
        {"hull_offset", c.hull_offset},
        {"seed", c.seed}}},
      {"scene",
       {{"ues", scene_ues},
        {"targets", scene_targets},
        {"sensing_impulse",
         {{"delay_bin", c.impulse_delay_bin},
          {"doppler_bin", c.impulse_doppler_bin}}}}},
      {"power",
       {{"mode", c.power.mode == PowerConfig::Mode::Fixed ? "fixed" : "solve"},
        {"p_tot_dbm", watt_to_dbm(c.power.p_tot_w)},
        {"sensing_ratio_db", linear_to_db(c.power.sensing_ratio)},
        {"gamma_thr_ft_db", linear_to_db(c.power.gamma_thr_ft)},
        {"gamma_thr_dd_db", linear_to_db(c.power.gamma_thr_dd)},
        {"aclr_rel_db", linear_to_db(c.power.aclr_rel)},
        {"aclr_abs_dbm_per_mhz", watt_to_dbm(c.power.aclr_abs_w_per_hz * 1e6)},
        {"p_max_dbm", watt_to_dbm(c.power.p_max_w)}}},
      {"noise",
       {{"noise_figure_db", c.noise_figure_db}, {"l_antennas", c.l_antennas}}},
      {"experiment", e}};
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw SchemaError(std::string("json: ") + err.what());
  }
  std::vector<std::string> errors;
  auto cfg = parse_into(root, errors);
  ValidationReport report;
  report.errors = errors;
  physics_checks(cfg, report);
  if (!report.errors.empty()) throw SchemaError(report.errors.front());
  return cfg;
}

ValidationReport validate_scenario(const std::string& json_text) {
  ValidationReport report;
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& err) {
    report.errors.push_back(std::string("json: ") + err.what());
    return report;
  }
  auto cfg = parse_into(root, report.errors);
  if (report.errors.empty()) physics_checks(cfg, report);
  return report;
}

std::string scenario_to_json(const ScenarioConfig& config) {
  return scenario_json(config).dump(2);
}

std::string scenario_schema_json() {
  static const char* text = R"schema({
  "grid": {
    "m": "int >= 2, subcarrier count (default 1024)",
    "n": "int >= 2, symbol count (default 128)",
    "delta_f_hz": "number > 0, subcarrier spacing (default 976562.5)",
    "t_cp_s": "number >= 0, cyclic prefix duration (default 1.02e-7)",
    "f0_hz": "number > 0, carrier frequency (default 3e10)"
  },
  "allocation": {
    "k": "int >= 1, UE count (default 1)",
    "m_com": "int in [1, m], communication subcarriers (default m/2)",
    "eta": "number in (0, 1], occupancy fraction (default 0.5)",
    "scheme": "contiguous-blocks | random-uniform (default random-uniform)",
    "hull_offset": "int, frequency shift of the communication band (default 0)",
    "seed": "uint64 master seed (default 1; --seed overrides)"
  },
  "scene": {
    "ues": "[{paths: [{range_m, velocity_mps, beam_gain?}]}] (default one LOS UE at 50 m)",
    "targets": "[{rcs_m2, range_m, velocity_mps, beam_gain?}] (default one 1 m^2 target at 50 m)",
    "sensing_impulse": "{delay_bin in [0, m-1], doppler_bin in [-n/2, n/2-1]} (default 0, 0)"
  },
  "power": {
    "mode": "fixed | solve (default fixed)",
    "p_tot_dbm": "total emitted power for fixed mode (default 43)",
    "sensing_ratio_db": "(sigma_sen/sigma_com)^2 in dB for fixed mode (default -30)",
    "gamma_thr_ft_db": "UE SDNR threshold for solve mode (default 10)",
    "gamma_thr_dd_db": "sensing SDNR threshold for solve mode (default 10)",
    "aclr_rel_db": "min in-band/out-of-band power ratio (default 20)",
    "aclr_abs_dbm_per_mhz": "PSD cap on the sensing signal (default -13)",
    "p_max_dbm": "budget for solve mode (default 43)"
  },
  "noise": {
    "noise_figure_db": "receiver noise figure over kT*delta_f (default 10)",
    "l_antennas": "BS array size L (default 100)"
  },
  "experiment": {
    "name": "sdnr-vs-range | crb-ratio-eta | crb-ratio-two-targets | mter-sweep | ambiguity-slice | rate-vs-power | montecarlo-estimation | power-allocation",
    "trials": "Monte Carlo trials where applicable (default 200; --trials overrides)",
    "ranges_m": "[numbers] range axis",
    "mcom_fracs": "[numbers] M_com/M axis",
    "etas": "[numbers] occupancy axis",
    "separations_bins": "[numbers] (tau2-tau1)/delta_tau axis",
    "p_tot_dbm_axis": "[numbers] power axis",
    "snr_post_db": "[numbers] post-processing-gain SNR axis",
    "tau_max_bins": "delay extent of ambiguity slices (default 8)",
    "slice_points": "samples per ambiguity slice (default 321)",
    "mter_variant": "sqrt | energy (default sqrt)",
    "refine": "bool, sub-bin parabolic interpolation (default false)",
    "mc_delay_bin": "true target delay bin for montecarlo-estimation (default 50)",
    "mc_doppler_bin": "true target Doppler bin (default 10)"
  }
})schema";
  return text;
}

}  // namespace isac
