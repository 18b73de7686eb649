#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "isac/errors.hpp"
#include "isac/grid.hpp"

namespace isac {

enum class Domain { FT, DD, TD };

inline const char* domain_name(Domain d) {
  switch (d) {
    case Domain::FT: return "FT";
    case Domain::DD: return "DD";
    default: return "TD";
  }
}

/**
 * An M x N complex matrix tagged with the domain it lives in.
 *
 * FT storage: row m + M/2 <-> subcarrier m, column n + N/2 <-> symbol n.
 * DD storage: row l <-> delay bin l in [0, M-1], column p + N/2 <-> Doppler
 * bin p. The grid travels with the data so transforms can check consistency.
 */
template <typename Scalar = double>
struct GridSignal {
  using Complex = std::complex<Scalar>;
  using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

  Matrix data;
  Domain domain = Domain::FT;
  GridSpec grid;

  GridSignal() = default;
  GridSignal(const GridSpec& g, Domain d)
      : data(Matrix::Zero(g.M, g.N)), domain(d), grid(g) {}

  Scalar energy() const { return data.squaredNorm(); }

  Complex& at(int m_or_l, int n_or_p) {
    return data(row_index(m_or_l), grid.col_of(n_or_p));
  }
  Complex at(int m_or_l, int n_or_p) const {
    return data(row_index(m_or_l), grid.col_of(n_or_p));
  }

 private:
  int row_index(int first) const {
    return domain == Domain::DD ? first : grid.row_of(first);
  }
};

inline void require_domain(Domain have, Domain want, const char* op) {
  if (have != want)
    throw DomainError(std::string(op) + ": expected " + domain_name(want) +
                      "-domain input, got " + domain_name(have));
}

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* op) {
  if (a.M != b.M || a.N != b.N || a.delta_f != b.delta_f || a.t_cp != b.t_cp)
    throw DomainError(std::string(op) + ": grid mismatch");
}

/**
 * Amplitude plan for the superposed waveform: per-UE amplitudes sigma_com[k]
 * (sqrt(W) per resource element on that UE's set) and the per-bin sensing
 * amplitude sigma_sen_ft. Bandwidth-integrated powers follow
 * P_com = |Sigma_com|_F^2 / N and P_sen = M sigma_sen_ft^2.
 */
template <typename Scalar = double>
struct PowerPlan {
  std::vector<Scalar> sigma_com;  // one amplitude per UE
  Scalar sigma_sen_ft = 0;

  Scalar p_com(const Allocation& alloc, const GridSpec& grid) const {
    Scalar sum = 0;
    for (std::size_t k = 0; k < alloc.user_sets.size(); ++k) {
      const Scalar s = k < sigma_com.size() ? sigma_com[k] : Scalar(0);
      sum += s * s * static_cast<Scalar>(alloc.user_sets[k].size());
    }
    return sum / static_cast<Scalar>(grid.N);
  }

  Scalar p_sen(const GridSpec& grid) const {
    return static_cast<Scalar>(grid.M) * sigma_sen_ft * sigma_sen_ft;
  }

  // DD-domain sensing amplitude squared: (sigma_sen^DD)^2 = M N (sigma_sen^FT)^2.
  Scalar sigma_sen_dd_sq(const GridSpec& grid) const {
    return static_cast<Scalar>(grid.M) * static_cast<Scalar>(grid.N) *
           sigma_sen_ft * sigma_sen_ft;
  }

  // Average comm power per DD bin: (sigma_com^DD)^2 = |Sigma|_F^2 / (M N).
  Scalar sigma_com_dd_sq(const Allocation& alloc, const GridSpec& grid) const {
    return p_com(alloc, grid) / static_cast<Scalar>(grid.M);
  }

  // The Sigma_com matrix in FT storage layout (real amplitudes).
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sigma_matrix(
      const Allocation& alloc, const GridSpec& grid) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> s =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(grid.M, grid.N);
    for (std::size_t k = 0; k < alloc.user_sets.size(); ++k) {
      const Scalar amp = k < sigma_com.size() ? sigma_com[k] : Scalar(0);
      for (const auto& idx : alloc.user_sets[k])
        s(grid.row_of(idx.m), grid.col_of(idx.n)) = amp;
    }
    return s;
  }
};

}  // namespace isac
