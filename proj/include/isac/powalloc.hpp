#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "isac/constants.hpp"
#include "isac/errors.hpp"
#include "isac/linprog.hpp"

namespace isac {

/**
 * Power allocation instance: minimize the total emitted power subject to
 * per-UE FT SDNR thresholds, per-target DD sensing SDNR thresholds, relative
 * and absolute ACLR limits, nonnegativity and a total power budget. With
 * equal power per resource element within each UE's set the problem is
 * linear in the squared amplitudes x_k = p_com_k and y = (sigma_sen^FT)^2.
 */
struct AllocProblem {
  std::vector<double> kappa2_ue;        // per-UE channel gains (linear)
  std::vector<double> kappa2_sen;       // per-target two-way gains (linear)
  Eigen::MatrixXd chi;                  // Q x Q coupling, chi(q,q) unused
  std::vector<double> lambda_counts;    // |Lambda_k| resource elements per UE
  int M = 0, m_com = 0, m_ob = 0, N = 0;
  int L = 1;                            // BS antennas (noise after Rx BF)
  double gamma_thr_ft = 1.0;            // UE SDNR threshold (linear)
  double gamma_thr_dd = 1.0;            // sensing SDNR threshold (linear)
  double aclr_rel = 1.0;                // P_ib / P_ob lower bound (linear)
  double aclr_abs = 0.0;                // PSD cap [W/Hz]
  double delta_f = 0.0;                 // [Hz]
  double sigma_z2 = 0.0;                // per-bin noise power [W]
  double p_max = 0.0;                   // total power budget [W]
};

struct AllocSolution {
  enum class Status { Optimal, Infeasible };
  Status status = Status::Infeasible;
  std::vector<double> p_com_k;  // per-UE per-resource-element power [W]
  double p_sen = 0.0;           // (sigma_sen^FT)^2 [W]
  double p_tot = 0.0, p_ib = 0.0, p_ob = 0.0;
  std::vector<std::string> tight_constraints;
  std::string certificate;  // first violated family when infeasible
};

namespace detail {

struct ConstraintRow {
  Eigen::VectorXd coeffs;
  LpRelation rel;
  double rhs;
  std::string name;
};

inline std::vector<ConstraintRow> build_rows(const AllocProblem& pr) {
  const int k_count = static_cast<int>(pr.kappa2_ue.size());
  const int q_count = static_cast<int>(pr.kappa2_sen.size());
  const int nv = k_count + 1;  // x_0..x_{K-1}, y
  const double mn = static_cast<double>(pr.M) * pr.N;
  std::vector<ConstraintRow> rows;

  // (33b) kappa_k^2 x_k - gamma_ft kappa_k^2 y >= gamma_ft sigma_z^2
  for (int k = 0; k < k_count; ++k) {
    ConstraintRow r{Eigen::VectorXd::Zero(nv), LpRelation::GreaterEqual,
                    pr.gamma_thr_ft * pr.sigma_z2, "ue_sdnr[" + std::to_string(k) + "]"};
    r.coeffs(k) = pr.kappa2_ue[k];
    r.coeffs(k_count) = -pr.gamma_thr_ft * pr.kappa2_ue[k];
    rows.push_back(std::move(r));
  }

  // (33c) kappa_q^2 MN y >= gamma_dd (sum_{j!=q} kappa_j^2 chi_qj MN y
  //        + kappa_sen^2 (sum_k |Lambda_k| x_k)/(MN) + L sigma_z^2)
  double kappa_sen_total = 0.0;
  for (double g : pr.kappa2_sen) kappa_sen_total += g;
  for (int q = 0; q < q_count; ++q) {
    ConstraintRow r{Eigen::VectorXd::Zero(nv), LpRelation::GreaterEqual,
                    pr.gamma_thr_dd * pr.L * pr.sigma_z2,
                    "sensing_sdnr[" + std::to_string(q) + "]"};
    double leak = 0.0;
    for (int j = 0; j < q_count; ++j)
      if (j != q) leak += pr.kappa2_sen[j] * pr.chi(q, j);
    r.coeffs(k_count) = mn * (pr.kappa2_sen[q] - pr.gamma_thr_dd * leak);
    for (int k = 0; k < k_count; ++k)
      r.coeffs(k) = -pr.gamma_thr_dd * kappa_sen_total * pr.lambda_counts[k] / mn;
    rows.push_back(std::move(r));
  }

  // (33d) P_ib >= ACLR_rel P_ob: sum_k (|Lambda_k|/N) x_k
  //        + (M_com - ACLR_rel M_ob) y >= 0
  {
    ConstraintRow r{Eigen::VectorXd::Zero(nv), LpRelation::GreaterEqual, 0.0,
                    "aclr_rel"};
    for (int k = 0; k < k_count; ++k) r.coeffs(k) = pr.lambda_counts[k] / pr.N;
    r.coeffs(k_count) = pr.m_com - pr.aclr_rel * pr.m_ob;
    rows.push_back(std::move(r));
  }

  // (33e) y <= ACLR_abs delta_f
  {
    ConstraintRow r{Eigen::VectorXd::Zero(nv), LpRelation::LessEqual,
                    pr.aclr_abs * pr.delta_f, "aclr_abs"};
    r.coeffs(k_count) = 1.0;
    rows.push_back(std::move(r));
  }

  // (33h) P_tot <= P_max
  {
    ConstraintRow r{Eigen::VectorXd::Zero(nv), LpRelation::LessEqual, pr.p_max,
                    "budget"};
    for (int k = 0; k < k_count; ++k) r.coeffs(k) = pr.lambda_counts[k] / pr.N;
    r.coeffs(k_count) = pr.M;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace detail

inline void validate_problem(const AllocProblem& pr) {
  const int k_count = static_cast<int>(pr.kappa2_ue.size());
  const int q_count = static_cast<int>(pr.kappa2_sen.size());
  if (pr.M < 1 || pr.N < 1) throw ConfigError("powalloc: empty grid");
  if (pr.m_ob != pr.M - pr.m_com || pr.m_ob < 0)
    throw ConfigError("powalloc: M_ob must equal M - M_com and be >= 0");
  if (static_cast<int>(pr.lambda_counts.size()) != k_count)
    throw ConfigError("powalloc: lambda_counts must have one entry per UE");
  for (double c : pr.lambda_counts)
    if (c <= 0.0) throw ConfigError("powalloc: empty UE allocation");
  for (double g : pr.kappa2_ue)
    if (g <= 0.0) throw ConfigError("powalloc: UE gains must be positive");
  for (double g : pr.kappa2_sen)
    if (g <= 0.0) throw ConfigError("powalloc: target gains must be positive");
  if (q_count > 0 && (pr.chi.rows() != q_count || pr.chi.cols() != q_count))
    throw ConfigError("powalloc: chi must be Q x Q");
  if (pr.gamma_thr_ft <= 0.0 || pr.gamma_thr_dd <= 0.0)
    throw ConfigError("powalloc: thresholds must be positive");
  if (pr.aclr_rel <= 0.0 || pr.aclr_abs < 0.0 || pr.delta_f <= 0.0 ||
      pr.sigma_z2 <= 0.0 || pr.p_max <= 0.0)
    throw ConfigError("powalloc: ACLR/noise/budget parameters must be positive");
}

/// Evaluates every constraint family at a candidate solution; returns the
/// most negative relative slack (>= 0 means feasible).
inline double min_relative_slack(const AllocProblem& pr,
                                 const std::vector<double>& p_com_k,
                                 double p_sen) {
  const auto rows = detail::build_rows(pr);
  Eigen::VectorXd v(static_cast<int>(p_com_k.size()) + 1);
  for (std::size_t k = 0; k < p_com_k.size(); ++k)
    v(static_cast<int>(k)) = p_com_k[k];
  v(v.size() - 1) = p_sen;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    const double lhs = row.coeffs.dot(v);
    const double scale = std::max({std::abs(row.rhs),
                                   row.coeffs.cwiseAbs().maxCoeff() * v.cwiseAbs().maxCoeff(),
                                   1e-300});
    const double slack = row.rel == LpRelation::GreaterEqual
                             ? (lhs - row.rhs) / scale
                             : (row.rhs - lhs) / scale;
    worst = std::min(worst, slack);
  }
  // (33f, 33g) nonnegativity
  if (p_sen < 0.0) worst = std::min(worst, p_sen);
  for (double x : p_com_k)
    if (x < 0.0) worst = std::min(worst, x);
  return worst;
}

/**
 * Solves the allocation LP. K = Q = 0 degenerates to zero power. On
 * infeasibility the certificate names the first violated constraint family
 * in the order UE SDNR, sensing SDNR, ACLR, budget.
 */
inline AllocSolution solve(const AllocProblem& pr) {
  validate_problem(pr);
  const int k_count = static_cast<int>(pr.kappa2_ue.size());
  AllocSolution sol;
  if (k_count == 0 && pr.kappa2_sen.empty()) {
    sol.status = AllocSolution::Status::Optimal;
    sol.p_sen = sol.p_tot = sol.p_ib = sol.p_ob = 0.0;
    return sol;
  }

  const auto rows = detail::build_rows(pr);
  const int nv = k_count + 1;
  Eigen::VectorXd c(nv);
  for (int k = 0; k < k_count; ++k) c(k) = pr.lambda_counts[k] / pr.N;
  c(k_count) = pr.M;

  Eigen::MatrixXd a(static_cast<int>(rows.size()), nv);
  Eigen::VectorXd b(static_cast<int>(rows.size()));
  std::vector<LpRelation> rel;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    a.row(static_cast<int>(i)) = rows[i].coeffs.transpose();
    b(static_cast<int>(i)) = rows[i].rhs;
    rel.push_back(rows[i].rel);
  }

  const auto lp = solve_lp(c, a, rel, b);
  if (lp.status != LpResult::Status::Optimal) {
    sol.status = AllocSolution::Status::Infeasible;
    if (lp.infeasibility.size() == b.size()) {
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (lp.infeasibility(static_cast<int>(i)) > 1e-9) {
          sol.certificate = rows[i].name;
          break;
        }
    }
    if (sol.certificate.empty()) sol.certificate = "unsatisfiable constraint system";
    return sol;
  }

  sol.status = AllocSolution::Status::Optimal;
  sol.p_com_k.resize(static_cast<std::size_t>(k_count));
  for (int k = 0; k < k_count; ++k) sol.p_com_k[static_cast<std::size_t>(k)] = lp.x(k);
  sol.p_sen = lp.x(k_count);
  double p_com = 0.0;
  for (int k = 0; k < k_count; ++k)
    p_com += pr.lambda_counts[static_cast<std::size_t>(k)] * lp.x(k) / pr.N;
  sol.p_ib = p_com + pr.m_com * sol.p_sen;
  sol.p_ob = pr.m_ob * sol.p_sen;
  sol.p_tot = sol.p_ib + sol.p_ob;

  Eigen::VectorXd v(nv);
  v.head(k_count) = lp.x.head(k_count);
  v(k_count) = sol.p_sen;
  for (const auto& row : rows) {
    const double lhs = row.coeffs.dot(v);
    const double scale = std::max(
        {std::abs(row.rhs), row.coeffs.cwiseAbs().maxCoeff() * std::max(v.cwiseAbs().maxCoeff(), 1e-300), 1e-300});
    if (std::abs(lhs - row.rhs) / scale < 1e-7) sol.tight_constraints.push_back(row.name);
  }
  return sol;
}

}  // namespace isac
