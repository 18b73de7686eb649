#pragma once

// Test-only reference implementations, kept deliberately independent of the
// library code paths they check: literal double sums, finite differences of
// the Gaussian log-likelihood, and small-step quadrature.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "isac/grid.hpp"

namespace oracle {

using Cplx = std::complex<double>;
constexpr double kPi = 3.141592653589793238462643383279502884;

// chi(tau, nu) by the literal double sum over signed (m, n).
inline Cplx ambiguity_point(const Eigen::MatrixXd& power, const isac::GridSpec& g,
                            double symbol_period, double tau, double nu) {
  Cplx acc(0.0, 0.0);
  for (int row = 0; row < g.M; ++row) {
    const double m = row - g.M / 2;
    for (int col = 0; col < g.N; ++col) {
      const double n = col - g.N / 2;
      const double ang = -2.0 * kPi * (m * g.delta_f * tau + n * symbol_period * nu);
      acc += power(row, col) * Cplx(std::cos(ang), std::sin(ang));
    }
  }
  return acc;
}

// Mean of the two-target FT observation, stacked column-major, for the
// Gaussian model y = b1 s.phase(tau1,nu1) + b2 s.phase(tau2,nu2) + z.
inline Eigen::VectorXcd model_mean(const Eigen::MatrixXd& power,
                                   const isac::GridSpec& g, Cplx b1, Cplx b2,
                                   double tau1, double tau2, double nu1,
                                   double nu2) {
  const double T = g.symbol_duration();
  Eigen::VectorXcd mu(g.M * g.N);
  int idx = 0;
  for (int col = 0; col < g.N; ++col) {
    const double n = col - g.N / 2;
    for (int row = 0; row < g.M; ++row) {
      const double m = row - g.M / 2;
      const double amp = std::sqrt(power(row, col));
      const double a1 = 2.0 * kPi * (n * T * nu1 - m * g.delta_f * tau1);
      const double a2 = 2.0 * kPi * (n * T * nu2 - m * g.delta_f * tau2);
      mu(idx++) = b1 * amp * Cplx(std::cos(a1), std::sin(a1)) +
                  b2 * amp * Cplx(std::cos(a2), std::sin(a2));
    }
  }
  return mu;
}

// Per-bin noise variances for the same stacking order.
inline Eigen::VectorXd model_noise_diag(const isac::GridSpec& g, double sigma_z2,
                                        const Eigen::MatrixXd* p_com,
                                        double b1_abs2, double b2_abs2) {
  Eigen::VectorXd d(g.M * g.N);
  int idx = 0;
  for (int col = 0; col < g.N; ++col)
    for (int row = 0; row < g.M; ++row) {
      double v = sigma_z2;
      if (p_com) v += (b1_abs2 + b2_abs2) * (*p_com)(row, col);
      d(idx++) = v;
    }
  return d;
}

// Finite-difference Fisher information of the complex-Gaussian likelihood:
// I_ij = 2 Re{ dmu_i^H R^-1 dmu_j } with central differences in the four
// parameters (tau1, tau2, nu1, nu2); steps are scaled per axis.
inline Eigen::Matrix4d fd_fisher(const Eigen::MatrixXd& power,
                                 const isac::GridSpec& g, Cplx b1, Cplx b2,
                                 double tau1, double tau2, double nu1, double nu2,
                                 double sigma_z2, const Eigen::MatrixXd* p_com,
                                 double step_tau, double step_nu) {
  const auto diag =
      model_noise_diag(g, sigma_z2, p_com, std::norm(b1), std::norm(b2));
  auto mean_at = [&](double t1, double t2, double v1, double v2) {
    return model_mean(power, g, b1, b2, t1, t2, v1, v2);
  };
  std::vector<Eigen::VectorXcd> grads;
  const double steps[4] = {step_tau, step_tau, step_nu, step_nu};
  for (int k = 0; k < 4; ++k) {
    double lo[4] = {tau1, tau2, nu1, nu2};
    double hi[4] = {tau1, tau2, nu1, nu2};
    lo[k] -= steps[k];
    hi[k] += steps[k];
    const auto plus = mean_at(hi[0], hi[1], hi[2], hi[3]);
    const auto minus = mean_at(lo[0], lo[1], lo[2], lo[3]);
    grads.push_back((plus - minus) / (2.0 * steps[k]));
  }
  Eigen::Matrix4d info;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Cplx acc(0.0, 0.0);
      for (int b = 0; b < diag.size(); ++b)
        acc += std::conj(grads[i](b)) * grads[j](b) / diag(b);
      info(i, j) = 2.0 * acc.real();
    }
  return info;
}

}  // namespace oracle
