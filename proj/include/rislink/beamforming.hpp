// SPDX-License-Identifier: Apache-2.0
//
// BS precoders and RIS phase configurations: MRT for the direct link,
// alternating optimization for the cascaded link, DFT-codebook beam
// selection, and the random-phase baseline.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rislink/channel.hpp"
#include "rislink/errors.hpp"
#include "rislink/numerics.hpp"
#include "rislink/rng.hpp"

namespace rislink::beamform {

using numerics::cplx;
using numerics::CMatrix;
using numerics::CVector;

enum class BeamMethod { kAo, kDft, kRandom };

struct AoOptions {
  int max_iters = 100;
  double rel_tol = 1e-8;
};

struct BeamSolution {
  CVector w_d;                 // direct-link precoder (filled by the caller)
  CVector w_r;                 // cascaded-link precoder, unit norm
  std::vector<double> phases;  // RIS phases, radians in [0, 2*pi)
  BeamMethod method = BeamMethod::kAo;
  int iterations = 0;
  std::vector<double> trace;   // |cascade gain| after each iteration
};

inline CVector mrt_direct(const CVector& h_d) { return numerics::mrt(h_d); }

// Phase rule of the AO inner step: rotate every RIS element so that its
// term h_ri(k) e^{j phi_k} h_w(k) lands on the positive real axis. The
// aligned sum then attains the triangle-inequality bound
// sum_k |h_ri(k)| |h_w(k)|.
inline std::vector<double> align_phases(const CVector& h_ri,
                                        const CVector& h_w) {
  numerics::detail::require_same_size(h_ri, h_w, "align_phases");
  std::vector<double> phases(h_ri.size());
  for (std::size_t k = 0; k < h_ri.size(); ++k)
    phases[k] = numerics::wrap_angle(-std::arg(h_ri[k] * h_w[k]));
  return phases;
}

// Alternating optimization of the RIS phases and the BS precoder for the
// cascaded link. Each half-step is a conditional maximizer of
// |h_ri diag(e^{j phi}) h_br w_r|, so the recorded objective trace is
// non-decreasing:
//   - phases align every term h_ri(k) e^{j phi_k} (h_br w_r)(k) to the
//     positive real axis;
//   - w_r is the dominant right singular direction of the cascade row.
inline BeamSolution ao_optimize(const CMatrix& h_br, const CVector& h_ri,
                                const AoOptions& opts = {},
                                const CVector* w_r_init = nullptr) {
  if (h_ri.size() != h_br.rows())
    throw DimensionError("ao_optimize: h_ri " + std::to_string(h_ri.size()) +
                         " vs h_br rows " + std::to_string(h_br.rows()));
  if (h_br.all_zero() || h_ri.all_zero())
    throw DegenerateChannelError("ao_optimize: zero channel");
  if (opts.max_iters < 1) throw ConfigError("ao_optimize: max_iters >= 1");

  const std::size_t n = h_ri.size();
  CVector w_r;
  if (w_r_init) {
    if (w_r_init->size() != h_br.cols())
      throw DimensionError("ao_optimize: w_r_init size mismatch");
    w_r = *w_r_init;
  } else {
    // start from MRT toward the strongest RIS->BS row
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t r = 0; r < h_br.rows(); ++r) {
      double s = 0.0;
      for (const cplx& x : h_br.row_span(r)) s += std::norm(x);
      if (s > best_norm) {
        best_norm = s;
        best = r;
      }
    }
    w_r = numerics::mrt(h_br.row(best));
  }

  BeamSolution sol;
  sol.method = BeamMethod::kAo;
  sol.phases.assign(n, 0.0);

  double prev = -1.0;
  for (int it = 1; it <= opts.max_iters; ++it) {
    const CVector h_w = numerics::matvec(h_br, w_r);
    sol.phases = align_phases(h_ri, h_w);

    const CVector g = channel::cascade_row(h_ri, sol.phases, h_br);
    const double obj = g.norm();  // equals |g w_r| once w_r = mrt(g)
    if (obj == 0.0)
      throw DegenerateChannelError("ao_optimize: cascade row vanished");
    w_r = numerics::dominant_right_eigvec(g);

    sol.trace.push_back(obj);
    sol.iterations = it;
    if (prev >= 0.0 && std::abs(obj - prev) <= opts.rel_tol * prev) break;
    prev = obj;
  }
  sol.w_r = std::move(w_r);
  return sol;
}

// N unimodular beams built as Kronecker products of two sqrt(N)-point DFT
// rows; satisfies V^H V = N I.
struct Codebook {
  std::size_t n = 0;
  CMatrix cols;  // n x n, column j is beam j

  CVector column(std::size_t j) const {
    CVector v(n);
    for (std::size_t m = 0; m < n; ++m) v[m] = cols(m, j);
    return v;
  }
};

inline Codebook dft_codebook(int n) {
  if (n < 1) throw ConfigError("dft_codebook: size must be >= 1");
  const int s = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (s * s != n)
    throw ConfigError("dft_codebook: size " + std::to_string(n) +
                      " is not a perfect square");
  Codebook cb;
  cb.n = static_cast<std::size_t>(n);
  cb.cols = CMatrix(cb.n, cb.n);
  const double base = 2.0 * std::numbers::pi / static_cast<double>(s);
  for (int c = 0; c < n; ++c) {
    const int i = c / s;
    const int j = c % s;
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b)
        cb.cols(static_cast<std::size_t>(a * s + b),
                static_cast<std::size_t>(c)) =
            std::polar(1.0, base * (i * a + j * b));
  }
  return cb;
}

struct CodebookSelection {
  std::size_t best_index = 0;      // 0-based column index
  std::vector<double> phases;      // angles of the winning beam, [0, 2*pi)
  CVector w_dft;                   // MRT on the winning cascade row
  double best_power = 0.0;         // |h_ri diag(v) h_br|^2 of the winner
};

// Exhaustive scan over the codebook: per beam, evaluate the received
// power of the cascade row; ties keep the lowest index.
inline CodebookSelection codebook_select(const CMatrix& h_br,
                                         const CVector& h_ri,
                                         const Codebook& cb) {
  if (cb.n == 0) throw ConfigError("codebook_select: empty codebook");
  if (h_ri.size() != h_br.rows() || cb.cols.rows() != h_ri.size())
    throw DimensionError("codebook_select: dimension mismatch");

  CodebookSelection sel;
  CVector best_row;
  double best = -1.0;
  std::vector<double> phases(cb.n);
  for (std::size_t c = 0; c < cb.n; ++c) {
    for (std::size_t k = 0; k < cb.n; ++k)
      phases[k] = std::arg(cb.cols(k, c));
    CVector row = channel::cascade_row(h_ri, phases, h_br);
    const double p = row.squared_norm();
    if (p > best) {
      best = p;
      sel.best_index = c;
      best_row = std::move(row);
    }
  }
  if (best_row.all_zero())
    throw DegenerateChannelError("codebook_select: cascade vanished");
  sel.best_power = best;
  sel.phases.resize(cb.n);
  for (std::size_t k = 0; k < cb.n; ++k)
    sel.phases[k] = numerics::wrap_angle(std::arg(cb.cols(k, sel.best_index)));
  sel.w_dft = numerics::mrt(best_row);
  return sel;
}

// i.i.d. uniform phases on [0, 2*pi).
inline std::vector<double> random_phases(int n, Rng& rng) {
  if (n < 1) throw ConfigError("random_phases: n must be >= 1");
  std::vector<double> phases(static_cast<std::size_t>(n));
  for (double& p : phases) p = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return phases;
}

}  // namespace rislink::beamform
