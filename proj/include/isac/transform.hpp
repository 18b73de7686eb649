#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <Eigen/Dense>

#include "isac/constants.hpp"
#include "isac/signal.hpp"

namespace isac {

namespace detail {

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT. sign = -1 forward, +1 inverse (unscaled).
template <typename Scalar>
void fft_radix2(std::complex<Scalar>* x, int n, int sign) {
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const Scalar ang = Scalar(sign) * Scalar(2) * static_cast<Scalar>(pi) / Scalar(len);
    const std::complex<Scalar> wlen(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      std::complex<Scalar> w(1, 0);
      for (int k = 0; k < len / 2; ++k) {
        const auto u = x[i + k];
        const auto v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// Unitary DFT operator with signed or zero-based index ranges on rows/cols:
// entry(a, b) = exp(-j 2 pi idx_r(a) idx_c(b) / K) / sqrt(K), where a signed
// axis maps storage index a to a - K/2.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>
make_unitary_dft(int K, bool signed_rows, bool signed_cols) {
  using Cplx = std::complex<Scalar>;
  Eigen::Matrix<Cplx, Eigen::Dynamic, Eigen::Dynamic> F(K, K);
  const Scalar norm = Scalar(1) / std::sqrt(static_cast<Scalar>(K));
  for (int a = 0; a < K; ++a) {
    const long long r = signed_rows ? a - K / 2 : a;
    for (int b = 0; b < K; ++b) {
      const long long c = signed_cols ? b - K / 2 : b;
      // Reduce the index product mod K before the trig call: keeps the
      // argument small so 1024-point operators stay accurate to ~1e-15.
      const long long q = ((r * c) % K + K) % K;
      const Scalar ang = Scalar(-2) * static_cast<Scalar>(pi) *
                         static_cast<Scalar>(q) / static_cast<Scalar>(K);
      F(a, b) = Cplx(std::cos(ang), std::sin(ang)) * norm;
    }
  }
  return F;
}

template <typename Scalar>
const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>&
cached_dft(int K, bool signed_rows, bool signed_cols) {
  using Matrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
  static std::map<std::tuple<int, bool, bool>, std::unique_ptr<Matrix>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{K, signed_rows, signed_cols}];
  if (!slot)
    slot = std::make_unique<Matrix>(make_unitary_dft<Scalar>(K, signed_rows, signed_cols));
  return *slot;
}

}  // namespace detail

// The signed-index unitary operators factor into plain FFTs plus (-1)^k
// twiddles, e.g. F_M(m_row=r, l) = (-1)^l e^{-j2pi r l/M}/sqrt(M). The
// fast path below exploits that for power-of-two sizes; the dense operator
// product remains as the general fallback and as a cross-check in tests.
namespace detail {

// Applies the delay-axis operator column-wise. forward=true computes
// F_M * X (DD->FT direction), forward=false computes F_M^H * X.
template <typename Scalar>
void delay_axis_fft(Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic,
                                  Eigen::Dynamic>& x,
                    bool forward) {
  const int M = static_cast<int>(x.rows());
  const Scalar norm = Scalar(1) / std::sqrt(static_cast<Scalar>(M));
  for (int col = 0; col < x.cols(); ++col) {
    auto* ptr = x.col(col).data();
    if (forward) {
      for (int l = 1; l < M; l += 2) ptr[l] = -ptr[l];
      fft_radix2(ptr, M, -1);
      for (int l = 0; l < M; ++l) ptr[l] *= norm;
    } else {
      fft_radix2(ptr, M, +1);
      for (int l = 0; l < M; ++l) ptr[l] *= (l & 1) ? -norm : norm;
    }
  }
}

// Applies the Doppler-axis operator row-wise. forward=true computes
// X * F_N^H (DD->FT direction), forward=false computes X * F_N.
template <typename Scalar>
void doppler_axis_fft(Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic,
                                    Eigen::Dynamic>& x,
                      bool forward) {
  using Cplx = std::complex<Scalar>;
  const int N = static_cast<int>(x.cols());
  const Scalar norm = Scalar(1) / std::sqrt(static_cast<Scalar>(N));
  // i^N for even N: +1 when N % 4 == 0, -1 when N % 4 == 2.
  const Scalar quarter_phase = (N % 4 == 0) ? Scalar(1) : Scalar(-1);
  std::vector<Cplx> row(static_cast<std::size_t>(N));
  for (int r = 0; r < x.rows(); ++r) {
    for (int c = 0; c < N; ++c)
      row[static_cast<std::size_t>(c)] = (c & 1) ? -x(r, c) : x(r, c);
    fft_radix2(row.data(), N, forward ? +1 : -1);
    const Scalar base = quarter_phase * norm;
    for (int c = 0; c < N; ++c)
      x(r, c) = row[static_cast<std::size_t>(c)] * ((c & 1) ? -base : base);
  }
}

}  // namespace detail

/**
 * DD -> FT map: S_ft = F_M S_dd F_N^H with unitary DFT factors, the delay
 * axis 0-based and the frequency/time/Doppler axes signed. A DD impulse at
 * (l_i, p_i) maps to the 2D sinusoid
 *   S_ft(m, n) = exp(j 2 pi (n p_i / N - m l_i / M)) / sqrt(M N).
 */
template <typename Scalar>
GridSignal<Scalar> dd_to_ft(const GridSignal<Scalar>& sig) {
  require_domain(sig.domain, Domain::DD, "dd_to_ft");
  GridSignal<Scalar> out(sig.grid, Domain::FT);
  if (detail::is_pow2(sig.grid.M) && detail::is_pow2(sig.grid.N)) {
    out.data = sig.data;
    detail::delay_axis_fft(out.data, true);
    detail::doppler_axis_fft(out.data, true);
  } else {
    const auto& F_m = detail::cached_dft<Scalar>(sig.grid.M, true, false);
    const auto& F_n = detail::cached_dft<Scalar>(sig.grid.N, true, true);
    out.data.noalias() = F_m * sig.data * F_n.adjoint();
  }
  return out;
}

/// FT -> DD map, the exact inverse (adjoint) of dd_to_ft.
template <typename Scalar>
GridSignal<Scalar> ft_to_dd(const GridSignal<Scalar>& sig) {
  require_domain(sig.domain, Domain::FT, "ft_to_dd");
  GridSignal<Scalar> out(sig.grid, Domain::DD);
  if (detail::is_pow2(sig.grid.M) && detail::is_pow2(sig.grid.N)) {
    out.data = sig.data;
    detail::doppler_axis_fft(out.data, false);
    detail::delay_axis_fft(out.data, false);
  } else {
    const auto& F_m = detail::cached_dft<Scalar>(sig.grid.M, true, false);
    const auto& F_n = detail::cached_dft<Scalar>(sig.grid.N, true, true);
    out.data.noalias() = F_m.adjoint() * sig.data * F_n;
  }
  return out;
}

/**
 * OFDM serializer: per symbol n, the M-point unitary inverse DFT of column n
 * prepended with its last round(t_cp / t_prime * M) samples. Output length
 * N * (M + M_cp), interleaved per symbol in time order.
 */
template <typename Scalar>
std::vector<std::complex<Scalar>> to_time_domain(const GridSignal<Scalar>& sig) {
  require_domain(sig.domain, Domain::FT, "to_time_domain");
  using Cplx = std::complex<Scalar>;
  const GridSpec& g = sig.grid;
  const int m_cp = g.cp_samples();
  // Sample i of symbol n is (1/sqrt(M)) sum_m X(m,n) e^{+j 2 pi m i / M},
  // which is the adjoint of the signed-row delay DFT applied column-wise.
  const auto& F_m = detail::cached_dft<Scalar>(g.M, true, false);
  const typename GridSignal<Scalar>::Matrix td = F_m.adjoint() * sig.data;
  std::vector<Cplx> stream;
  stream.reserve(static_cast<std::size_t>(g.N) * (g.M + m_cp));
  for (int col = 0; col < g.N; ++col) {
    for (int i = g.M - m_cp; i < g.M; ++i) stream.push_back(td(i, col));
    for (int i = 0; i < g.M; ++i) stream.push_back(td(i, col));
  }
  return stream;
}

}  // namespace isac
