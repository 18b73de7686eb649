#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "isac/constants.hpp"
#include "isac/errors.hpp"
#include "isac/rng.hpp"

namespace isac {

/**
 * Frequency-time resource lattice.
 *
 * The grid holds M subcarriers spaced delta_f apart and N symbols of total
 * duration T = t_prime + t_cp. Frequency indices m run over
 * [-M/2, M/2 - 1], time indices n over [-N/2, N/2 - 1]; the matching
 * delay-Doppler lattice uses delay bins l in [0, M - 1] and Doppler bins
 * p in [-N/2, N/2 - 1]. Storage maps (m, n) to row m + M/2, column n + N/2.
 */
struct GridSpec {
  int M = 0;             // subcarrier count
  int N = 0;             // symbol count
  double delta_f = 0.0;  // subcarrier spacing [Hz]
  double t_prime = 0.0;  // useful symbol duration [s], = 1/delta_f
  double t_cp = 0.0;     // cyclic prefix duration [s]
  double f0 = 0.0;       // carrier frequency [Hz]

  double symbol_duration() const { return t_prime + t_cp; }  // T
  double bandwidth() const { return M * delta_f; }
  double burst_duration() const { return N * symbol_duration(); }
  double cp_rate_loss() const { return t_prime / symbol_duration(); }
  int cp_samples() const {
    return static_cast<int>(std::llround(t_cp / t_prime * M));
  }

  int row_of(int m) const { return m + M / 2; }
  int col_of(int n) const { return n + N / 2; }
  int m_of_row(int row) const { return row - M / 2; }
  int n_of_col(int col) const { return col - N / 2; }
};

/// Delay/Doppler and range/velocity bin sizes implied by a grid.
struct DdResolution {
  double delta_tau = 0.0;       // [s]
  double delta_nu = 0.0;        // [Hz]
  double delta_range = 0.0;     // [m]
  double delta_velocity = 0.0;  // [m/s]
};

inline GridSpec build_grid(int M, int N, double delta_f, double t_cp, double f0) {
  if (M < 2 || N < 2) throw ConfigError("grid: M and N must both be >= 2");
  if (delta_f <= 0.0) throw ConfigError("grid: delta_f must be positive");
  if (t_cp < 0.0) throw ConfigError("grid: t_cp must be nonnegative");
  if (f0 <= 0.0) throw ConfigError("grid: f0 must be positive");
  GridSpec g;
  g.M = M;
  g.N = N;
  g.delta_f = delta_f;
  g.t_prime = 1.0 / delta_f;
  g.t_cp = t_cp;
  g.f0 = f0;
  return g;
}

inline DdResolution resolution_of(const GridSpec& g) {
  DdResolution r;
  r.delta_tau = 1.0 / (g.M * g.delta_f);
  r.delta_nu = 1.0 / (g.N * g.symbol_duration());
  r.delta_range = 0.5 * speed_of_light * r.delta_tau;
  r.delta_velocity = 0.5 * speed_of_light / g.f0 * r.delta_nu;
  return r;
}

/// A single (m, n) lattice point in signed index convention.
struct IndexPair {
  int m = 0;
  int n = 0;
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

/// Axis-aligned index rectangle, bounds inclusive.
struct HullRect {
  int m_lo = 0, m_hi = -1;
  int n_lo = 0, n_hi = -1;
  int width() const { return m_hi - m_lo + 1; }
  int height() const { return n_hi - n_lo + 1; }
  bool contains(const IndexPair& idx) const {
    return idx.m >= m_lo && idx.m <= m_hi && idx.n >= n_lo && idx.n <= n_hi;
  }
};

enum class AllocationScheme { ContiguousBlocks, RandomUniform };

/**
 * Per-UE resource allocation: K pairwise-disjoint index sets inside the
 * communication hull, plus the occupancy bookkeeping driving the power
 * accounting (M_com in-band subcarriers, M_ob = M - M_com out of band).
 */
struct Allocation {
  std::vector<std::vector<IndexPair>> user_sets;
  HullRect hull;
  double eta = 0.0;
  int m_com = 0;
  int m_ob = 0;

  std::size_t total_elements() const {
    std::size_t t = 0;
    for (const auto& s : user_sets) t += s.size();
    return t;
  }
};

/// Bounding rectangle of the union of the given sets.
inline HullRect hull_of(const std::vector<std::vector<IndexPair>>& sets) {
  HullRect h;
  bool any = false;
  for (const auto& s : sets) {
    for (const auto& idx : s) {
      if (!any) {
        h.m_lo = h.m_hi = idx.m;
        h.n_lo = h.n_hi = idx.n;
        any = true;
      } else {
        h.m_lo = std::min(h.m_lo, idx.m);
        h.m_hi = std::max(h.m_hi, idx.m);
        h.n_lo = std::min(h.n_lo, idx.n);
        h.n_hi = std::max(h.n_hi, idx.n);
      }
    }
  }
  if (!any) throw AllocationError("hull_of: empty union");
  return h;
}

namespace detail {

// Subcarrier rows of the hull ordered center-out, so that filling them in
// order yields a band that stays symmetric around the hull center.
inline std::vector<int> center_out_rows(int m_lo, int m_hi) {
  const double center = 0.5 * (m_lo + m_hi);
  std::vector<int> rows(static_cast<std::size_t>(m_hi - m_lo + 1));
  std::iota(rows.begin(), rows.end(), m_lo);
  std::stable_sort(rows.begin(), rows.end(), [center](int a, int b) {
    return std::abs(a - center) < std::abs(b - center);
  });
  return rows;
}

}  // namespace detail

/**
 * Allocate round(eta * M_com * N) resource elements among K UEs inside the
 * centered M_com-subcarrier hull.
 *
 * ContiguousBlocks fills whole subcarrier rows center-out (frequency-
 * contiguous bands, one chunk per UE); RandomUniform draws the elements
 * uniformly without replacement and deals them to the UEs in draw order.
 * hull_offset shifts the hull in frequency (0 keeps it carrier-centered).
 */
inline Allocation allocate_users(const GridSpec& grid, int K, int m_com,
                                 double eta, AllocationScheme scheme, Rng& rng,
                                 int hull_offset = 0) {
  if (K < 1) throw AllocationError("allocate_users: K must be >= 1");
  if (m_com < 1 || m_com > grid.M)
    throw AllocationError("allocate_users: M_com must be in [1, M]");
  if (!(eta > 0.0) || eta > 1.0)
    throw AllocationError("allocate_users: eta must be in (0, 1]");

  const long long capacity = static_cast<long long>(m_com) * grid.N;
  // Ties round up (llround rounds half away from zero; eta > 0 here).
  const long long total = std::llround(eta * static_cast<double>(capacity));
  if (total < K)
    throw AllocationError(
        "allocate_users: infeasible (eta, K, M_com): fewer elements than UEs");

  Allocation alloc;
  alloc.m_com = m_com;
  alloc.m_ob = grid.M - m_com;
  alloc.eta = static_cast<double>(total) / static_cast<double>(capacity);

  HullRect hull;
  hull.m_lo = -(m_com / 2) + hull_offset;
  hull.m_hi = hull.m_lo + m_com - 1;
  hull.n_lo = -(grid.N / 2);
  hull.n_hi = grid.N / 2 - 1;
  if (hull.m_lo < -(grid.M / 2) || hull.m_hi > grid.M / 2 - 1)
    throw AllocationError("allocate_users: hull offset pushes band off-grid");
  alloc.hull = hull;

  std::vector<IndexPair> order;
  order.reserve(static_cast<std::size_t>(total));
  if (scheme == AllocationScheme::ContiguousBlocks) {
    const auto rows = detail::center_out_rows(hull.m_lo, hull.m_hi);
    for (int row : rows) {
      if (static_cast<long long>(order.size()) >= total) break;
      for (int n = hull.n_lo; n <= hull.n_hi; ++n) {
        if (static_cast<long long>(order.size()) >= total) break;
        order.push_back({row, n});
      }
    }
  } else {
    // Partial Fisher-Yates over the hull cells: first `total` entries are a
    // uniform sample without replacement.
    std::vector<IndexPair> cells;
    cells.reserve(static_cast<std::size_t>(capacity));
    for (int m = hull.m_lo; m <= hull.m_hi; ++m)
      for (int n = hull.n_lo; n <= hull.n_hi; ++n) cells.push_back({m, n});
    for (long long i = 0; i < total; ++i) {
      const auto j = i + static_cast<long long>(
                             rng.uniform_int(static_cast<std::uint64_t>(capacity - i)));
      std::swap(cells[static_cast<std::size_t>(i)], cells[static_cast<std::size_t>(j)]);
      order.push_back(cells[static_cast<std::size_t>(i)]);
    }
  }

  alloc.user_sets.resize(static_cast<std::size_t>(K));
  const long long base = total / K;
  const long long extra = total % K;
  std::size_t cursor = 0;
  for (int k = 0; k < K; ++k) {
    const long long count = base + (k < extra ? 1 : 0);
    auto& set = alloc.user_sets[static_cast<std::size_t>(k)];
    set.assign(order.begin() + static_cast<std::ptrdiff_t>(cursor),
               order.begin() + static_cast<std::ptrdiff_t>(cursor + count));
    cursor += static_cast<std::size_t>(count);
  }
  return alloc;
}

}  // namespace isac
