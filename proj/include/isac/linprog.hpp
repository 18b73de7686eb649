#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "isac/errors.hpp"

namespace isac {

enum class LpRelation { LessEqual, GreaterEqual };

struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  // Phase-1 residual per constraint when infeasible (0 where satisfiable).
  Eigen::VectorXd infeasibility;
};

/**
 * Minimizes c^T x subject to A x (<=|>=) b and x >= 0 with a dense
 * two-phase tableau simplex (Bland's rule). Dimensions here are tiny
 * (K + 1 variables, K + Q + 4 rows), so clarity beats sparsity.
 */
inline LpResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a,
                         const std::vector<LpRelation>& relations,
                         const Eigen::VectorXd& b) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(b.size());
  if (a.rows() != m || a.cols() != n || static_cast<int>(relations.size()) != m)
    throw ConfigError("solve_lp: inconsistent dimensions");

  // Scale rows so pivot tolerances are meaningful across badly scaled inputs.
  Eigen::MatrixXd arows = a;
  Eigen::VectorXd brhs = b;
  std::vector<LpRelation> rel = relations;
  for (int i = 0; i < m; ++i) {
    const double scale = std::max(arows.row(i).cwiseAbs().maxCoeff(), std::abs(brhs(i)));
    if (scale > 0.0) {
      arows.row(i) /= scale;
      brhs(i) /= scale;
    }
  }

  // Canonical form: every row becomes an equality with +1 slack (<=) or
  // -1 surplus (>=); rows with negative rhs are negated first. Rows without
  // a usable +1 basic column get an artificial variable.
  for (int i = 0; i < m; ++i) {
    if (brhs(i) < 0.0) {
      arows.row(i) = -arows.row(i);
      brhs(i) = -brhs(i);
      rel[i] = rel[i] == LpRelation::LessEqual ? LpRelation::GreaterEqual
                                               : LpRelation::LessEqual;
    }
  }

  int n_slack = m;
  std::vector<int> artificial_rows;
  for (int i = 0; i < m; ++i)
    if (rel[i] == LpRelation::GreaterEqual) artificial_rows.push_back(i);
  const int n_art = static_cast<int>(artificial_rows.size());
  const int total = n + n_slack + n_art;

  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m, total + 1);
  tab.block(0, 0, m, n) = arows;
  for (int i = 0; i < m; ++i) {
    tab(i, n + i) = rel[i] == LpRelation::LessEqual ? 1.0 : -1.0;
    tab(i, total) = brhs(i);
  }
  std::vector<int> basis(m);
  {
    int art = 0;
    for (int i = 0; i < m; ++i) {
      if (rel[i] == LpRelation::LessEqual) {
        basis[i] = n + i;
      } else {
        tab(i, n + n_slack + art) = 1.0;
        basis[i] = n + n_slack + art;
        ++art;
      }
    }
  }

  constexpr double eps = 1e-11;
  auto run_simplex = [&](const Eigen::VectorXd& cost) -> bool {
    // Returns false on unboundedness; reduced costs via the tableau rows.
    for (int iter = 0; iter < 10000; ++iter) {
      Eigen::VectorXd reduced = cost.head(total);
      for (int i = 0; i < m; ++i)
        reduced -= cost(basis[i]) * tab.row(i).head(total).transpose();
      int entering = -1;
      for (int j = 0; j < total; ++j)  // Bland: first negative
        if (reduced(j) < -eps) {
          entering = j;
          break;
        }
      if (entering < 0) return true;
      int leaving = -1;
      double best = 0.0;
      for (int i = 0; i < m; ++i) {
        const double aij = tab(i, entering);
        if (aij > eps) {
          const double ratio = tab(i, total) / aij;
          if (leaving < 0 || ratio < best - eps ||
              (std::abs(ratio - best) <= eps && basis[i] < basis[leaving])) {
            leaving = i;
            best = ratio;
          }
        }
      }
      if (leaving < 0) return false;
      tab.row(leaving) /= tab(leaving, entering);
      for (int i = 0; i < m; ++i)
        if (i != leaving && std::abs(tab(i, entering)) > 0.0)
          tab.row(i) -= tab(i, entering) * tab.row(leaving);
      basis[leaving] = entering;
    }
    throw ConfigError("solve_lp: simplex iteration limit");
  };

  LpResult result;
  if (n_art > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(total);
    phase1.tail(n_art).setOnes();
    run_simplex(phase1);
    double art_sum = 0.0;
    for (int i = 0; i < m; ++i)
      if (basis[i] >= n + n_slack) art_sum += tab(i, total);
    if (art_sum > 1e-8) {
      result.status = LpResult::Status::Infeasible;
      result.infeasibility = Eigen::VectorXd::Zero(m);
      for (int i = 0; i < m; ++i)
        if (basis[i] >= n + n_slack) result.infeasibility(i) = tab(i, total);
      return result;
    }
    // Drive residual artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
      if (basis[i] < n + n_slack) continue;
      int pivot = -1;
      for (int j = 0; j < n + n_slack; ++j)
        if (std::abs(tab(i, j)) > eps) {
          pivot = j;
          break;
        }
      if (pivot >= 0) {
        tab.row(i) /= tab(i, pivot);
        for (int r = 0; r < m; ++r)
          if (r != i) tab.row(r) -= tab(r, pivot) * tab.row(i);
        basis[i] = pivot;
      }
    }
  }

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(total);
  phase2.head(n) = c;
  // Keep artificials pinned at zero cost but forbid re-entry.
  for (int j = n + n_slack; j < total; ++j) phase2(j) = 1e9;
  if (!run_simplex(phase2)) {
    result.status = LpResult::Status::Unbounded;
    return result;
  }

  result.status = LpResult::Status::Optimal;
  result.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) result.x(basis[i]) = tab(i, total);
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace isac
