#pragma once

#include <cmath>

namespace isac {

// Physical constants (SI).
inline constexpr double speed_of_light = 299792458.0;        // m/s, exact
inline constexpr double boltzmann_k = 1.380649e-23;          // J/K, exact
inline constexpr double reference_temperature_k = 290.0;     // noise reference

inline constexpr double pi = 3.141592653589793238462643383279502884;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

}  // namespace isac
