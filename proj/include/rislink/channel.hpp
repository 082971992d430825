// SPDX-License-Identifier: Apache-2.0
//
// Propagation models and per-trial channel generation: mmMAGIC-style
// path loss with lognormal shadowing, Rayleigh fading, and a ULA
// steering-vector multipath model, assembled into the four links of a
// RIS-assisted downlink (direct, BS->RIS, RIS->IU, BS->NIU, and the
// optional RIS->NIU leakage link).

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rislink/errors.hpp"
#include "rislink/numerics.hpp"
#include "rislink/rng.hpp"

namespace rislink::channel {

using numerics::cplx;
using numerics::CMatrix;
using numerics::CVector;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Vec2 a, Vec2 b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct Geometry {
  Vec2 bs;
  Vec2 ris;
  Vec2 iu;
  Vec2 niu;
  double gain_bs_dbi = 18.0;
  double gain_ris_dbi = 18.0;
  double gain_ue_dbi = 0.0;
  int n_t = 32;  // BS antennas
  int n = 100;   // RIS elements
};

enum class FadingModel { kRayleigh, kMultipath };

struct ChannelModelConfig {
  FadingModel model = FadingModel::kRayleigh;
  double fc_ghz = 28.0;
  double shadowing_sigma_db = 2.0;
  int n_paths = 3;
  // Shadowing on the two RIS segments: independent draws by default; the
  // alternative shares one draw across BS->RIS and RIS->IU.
  bool independent_ris_shadowing = true;
  // Generate the RIS->NIU leakage link h_rn.
  bool with_ris_niu_link = false;
  // Multipath extra-path angles are drawn uniformly over
  // [-aod_range_rad/2, +aod_range_rad/2] around broadside.
  double aod_range_rad = std::numbers::pi;
  // Fixed departure angles for the IU link (testing hook); when set, the
  // uniform draw is skipped and the list length must equal n_paths.
  std::optional<std::vector<double>> fixed_aods;
  // Test seams: force every link gain / skip the fading draw.
  std::optional<double> override_link_gain;
  bool unit_fading = false;

  void validate() const {
    if (!(fc_ghz > 0.0)) throw ConfigError("fc_ghz must be > 0");
    if (n_paths < 1) throw ConfigError("n_paths must be >= 1");
    if (shadowing_sigma_db < 0.0)
      throw ConfigError("shadowing_sigma_db must be >= 0");
    if (fixed_aods && static_cast<int>(fixed_aods->size()) != n_paths)
      throw ConfigError("fixed_aods length must equal n_paths");
  }
};

struct ChannelSet {
  CVector h_d;                  // 1 x n_t, BS->IU direct
  CMatrix h_br;                 // n x n_t, BS->RIS
  CVector h_ri;                 // 1 x n,   RIS->IU
  CVector h_n;                  // 1 x n_t, BS->NIU
  std::optional<CVector> h_rn;  // 1 x n,   RIS->NIU (leakage variant)
};

// mmMAGIC street-level LoS fit, fc in GHz, d in meters.
inline double path_loss_db(double d_m, double fc_ghz) {
  if (!(d_m > 0.0)) throw GeometryError("path_loss_db: distance must be > 0");
  if (!(fc_ghz > 0.0)) throw GeometryError("path_loss_db: fc must be > 0");
  return 19.2 * std::log10(d_m) + 32.9 + 20.8 * std::log10(fc_ghz);
}

// Linear power gain of one link: antenna gains minus path loss minus the
// (pre-drawn) shadowing sample, all in dB.
inline double link_gain_linear(double d_m, double fc_ghz, double tx_gain_dbi,
                               double rx_gain_dbi, double shadowing_db) {
  const double pl = path_loss_db(d_m, fc_ghz);
  return numerics::db_to_linear(tx_gain_dbi + rx_gain_dbi - pl - shadowing_db);
}

// ULA steering row for departure angle psi; element spacing given as a
// fraction of the wavelength (half-wavelength by default).
inline CVector steering_vector(int n_t, double psi,
                               double spacing_fraction = 0.5) {
  if (n_t < 1) throw DimensionError("steering_vector: n_t must be >= 1");
  CVector a(static_cast<std::size_t>(n_t));
  const double step = 2.0 * std::numbers::pi * spacing_fraction * std::sin(psi);
  for (int m = 0; m < n_t; ++m)
    a[static_cast<std::size_t>(m)] = std::polar(1.0, step * m);
  return a;
}

// i.i.d. circularly-symmetric complex Gaussian entries with per-entry
// mean power gain_linear.
inline CMatrix sample_rayleigh(std::size_t rows, std::size_t cols,
                               double gain_linear, Rng& rng) {
  if (!(gain_linear >= 0.0))
    throw DomainError("sample_rayleigh: gain must be >= 0");
  CMatrix h(rows, cols);
  const double amp = std::sqrt(gain_linear);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) h(r, c) = amp * rng.cgaussian();
  return h;
}

inline CVector sample_rayleigh_row(std::size_t n, double gain_linear,
                                   Rng& rng) {
  return sample_rayleigh(1, n, gain_linear, rng).row(0);
}

// Steering-vector multipath row: sqrt(gain/L) * sum_l beta_l a(psi_l),
// beta_l standard complex Gaussian (or 1 under unit_fading).
inline CVector sample_multipath(int n_t, const ChannelModelConfig& config,
                                double gain_linear,
                                const std::vector<double>& aods, Rng& rng) {
  if (aods.empty()) throw ConfigError("sample_multipath: empty AoD list");
  if (static_cast<int>(aods.size()) != config.n_paths)
    throw ConfigError("sample_multipath: AoD count " +
                      std::to_string(aods.size()) + " != n_paths " +
                      std::to_string(config.n_paths));
  if (!(gain_linear >= 0.0))
    throw DomainError("sample_multipath: gain must be >= 0");
  const std::size_t nt = static_cast<std::size_t>(n_t);
  CVector h(nt);
  const double L = static_cast<double>(aods.size());
  const double amp = std::sqrt(gain_linear / L);
  for (double psi : aods) {
    const cplx beta = config.unit_fading ? cplx{1.0, 0.0} : rng.cgaussian();
    const CVector a = steering_vector(n_t, psi);
    for (std::size_t m = 0; m < nt; ++m) h[m] += amp * beta * a[m];
  }
  return h;
}

// h_ri * diag(e^{j phi}) * h_br as a 1 x n_t row.
inline CVector cascade_row(const CVector& h_ri,
                           const std::vector<double>& phases,
                           const CMatrix& h_br) {
  if (h_ri.size() != h_br.rows() || phases.size() != h_ri.size())
    throw DimensionError("cascade_row: h_ri " + std::to_string(h_ri.size()) +
                         ", phases " + std::to_string(phases.size()) +
                         ", h_br rows " + std::to_string(h_br.rows()));
  CVector out(h_br.cols());
  for (std::size_t k = 0; k < h_ri.size(); ++k) {
    const cplx w = h_ri[k] * std::polar(1.0, phases[k]);
    if (w == cplx{}) continue;
    const auto row = h_br.row_span(k);
    for (std::size_t c = 0; c < row.size(); ++c) out[c] += w * row[c];
  }
  return out;
}

// Composite downlink row h_d + h_ri * diag(e^{j phi}) * h_br.
inline CVector composite_channel(const CVector& h_d, const CMatrix& h_br,
                                 const CVector& h_ri,
                                 const std::vector<double>& phases) {
  if (h_d.size() != h_br.cols())
    throw DimensionError("composite_channel: h_d " +
                         std::to_string(h_d.size()) + " vs h_br cols " +
                         std::to_string(h_br.cols()));
  return h_d + cascade_row(h_ri, phases, h_br);
}

namespace detail {

// Departure angle of `to` seen from `from`, measured against broadside
// (+x axis).
inline double los_angle(Vec2 from, Vec2 to) {
  return std::atan2(to.y - from.y, to.x - from.x);
}

}  // namespace detail

// One fading realization of all links. Draw order is fixed (shadowing,
// then AoDs, then fading link by link) so a given (geometry, config, seed)
// is bit-reproducible.
inline ChannelSet build_channel_set(const Geometry& geom,
                                    const ChannelModelConfig& config,
                                    Rng& rng) {
  config.validate();
  if (geom.n_t < 1 || geom.n < 1)
    throw GeometryError("build_channel_set: n_t and n must be >= 1");

  const std::size_t nt = static_cast<std::size_t>(geom.n_t);
  const std::size_t n = static_cast<std::size_t>(geom.n);

  auto shadow = [&]() {
    if (config.override_link_gain || config.shadowing_sigma_db == 0.0)
      return 0.0;
    return config.shadowing_sigma_db * rng.gaussian();
  };
  const double sh_d = shadow();
  const double sh_br = shadow();
  const double sh_ri = config.independent_ris_shadowing ? shadow() : sh_br;
  const double sh_n = shadow();
  const double sh_rn = config.with_ris_niu_link ? shadow() : 0.0;

  auto gain = [&](Vec2 a, Vec2 b, double tx_dbi, double rx_dbi, double sh) {
    if (config.override_link_gain) return *config.override_link_gain;
    return link_gain_linear(distance(a, b), config.fc_ghz, tx_dbi, rx_dbi, sh);
  };
  const double g_d = gain(geom.bs, geom.iu, geom.gain_bs_dbi, geom.gain_ue_dbi, sh_d);
  const double g_br = gain(geom.bs, geom.ris, geom.gain_bs_dbi, geom.gain_ris_dbi, sh_br);
  const double g_ri = gain(geom.ris, geom.iu, geom.gain_ris_dbi, geom.gain_ue_dbi, sh_ri);
  const double g_n = gain(geom.bs, geom.niu, geom.gain_bs_dbi, geom.gain_ue_dbi, sh_n);

  auto rayleigh_row = [&](std::size_t len, double g) {
    if (config.unit_fading) {
      CVector h(len);
      const double amp = std::sqrt(g);
      for (std::size_t i = 0; i < len; ++i) h[i] = amp;
      return h;
    }
    return sample_rayleigh_row(len, g, rng);
  };
  auto rayleigh_mat = [&](std::size_t r, std::size_t c, double g) {
    if (config.unit_fading) {
      CMatrix h(r, c);
      const double amp = std::sqrt(g);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) h(i, j) = amp;
      return h;
    }
    return sample_rayleigh(r, c, g, rng);
  };

  ChannelSet cs;
  if (config.model == FadingModel::kRayleigh) {
    cs.h_d = rayleigh_row(nt, g_d);
    cs.h_br = rayleigh_mat(n, nt, g_br);
    cs.h_ri = rayleigh_row(n, g_ri);
    cs.h_n = rayleigh_row(nt, g_n);
  } else {
    // BS-side links carry geometry through departure angles: the dominant
    // path sits on the LoS direction, the remaining n_paths-1 angles are
    // drawn uniformly; the NIU reuses the IU angles shifted by the angular
    // offset between the two users. RIS segments stay Rayleigh.
    std::vector<double> aods_iu;
    if (config.fixed_aods) {
      aods_iu = *config.fixed_aods;
    } else {
      aods_iu.push_back(detail::los_angle(geom.bs, geom.iu));
      for (int l = 1; l < config.n_paths; ++l)
        aods_iu.push_back(rng.uniform(-0.5 * config.aod_range_rad,
                                      0.5 * config.aod_range_rad));
    }
    const double shift = detail::los_angle(geom.bs, geom.niu) -
                         detail::los_angle(geom.bs, geom.iu);
    std::vector<double> aods_niu = aods_iu;
    for (double& psi : aods_niu) psi += shift;

    cs.h_d = sample_multipath(geom.n_t, config, g_d, aods_iu, rng);
    cs.h_br = rayleigh_mat(n, nt, g_br);
    cs.h_ri = rayleigh_row(n, g_ri);
    cs.h_n = sample_multipath(geom.n_t, config, g_n, aods_niu, rng);
  }
  if (config.with_ris_niu_link) {
    const double g_rn = gain(geom.ris, geom.niu, geom.gain_ris_dbi,
                             geom.gain_ue_dbi, sh_rn);
    cs.h_rn = rayleigh_row(n, g_rn);
  }
  return cs;
}

}  // namespace rislink::channel
