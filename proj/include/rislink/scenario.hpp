// SPDX-License-Identifier: Apache-2.0
//
// Scenario construction and Monte Carlo execution: Case 1 (NIU between BS
// and IU, NIU position swept) and Case 2 (NIU alongside the IU, transmit
// power swept), with the per-trial pipeline
//   channels -> beams -> exposure budget -> power split -> rate.
//
// Trials are independent work units seeded from (master seed, trial
// index); results are identical for any thread count.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rislink/beamforming.hpp"
#include "rislink/channel.hpp"
#include "rislink/emfe_power.hpp"
#include "rislink/errors.hpp"
#include "rislink/numerics.hpp"
#include "rislink/rng.hpp"

namespace rislink::scenario {

using channel::Geometry;
using channel::Vec2;
using numerics::CVector;

inline constexpr double kSpeedOfLightMps = 299792458.0;

enum class MethodTag {
  kRisOnly,               // m1
  kDirectOnly,            // m2
  kFillDirectAo,          // m3-ao
  kFillDirectDft,         // m3-dft
  kFillDirectDftRisLeak,  // m3-dft-risleak
  kExhaustiveAo,          // m4-ao
  kClosedFormUpper,       // m5
  kNoConstraint,          // no-constraint
  kRandomPhase,           // random-phase
};

inline const char* to_string(MethodTag tag) {
  switch (tag) {
    case MethodTag::kRisOnly: return "m1";
    case MethodTag::kDirectOnly: return "m2";
    case MethodTag::kFillDirectAo: return "m3-ao";
    case MethodTag::kFillDirectDft: return "m3-dft";
    case MethodTag::kFillDirectDftRisLeak: return "m3-dft-risleak";
    case MethodTag::kExhaustiveAo: return "m4-ao";
    case MethodTag::kClosedFormUpper: return "m5";
    case MethodTag::kNoConstraint: return "no-constraint";
    case MethodTag::kRandomPhase: return "random-phase";
  }
  return "?";
}

inline std::optional<MethodTag> parse_method_tag(std::string_view s) {
  using M = MethodTag;
  for (M tag : {M::kRisOnly, M::kDirectOnly, M::kFillDirectAo,
                M::kFillDirectDft, M::kFillDirectDftRisLeak, M::kExhaustiveAo,
                M::kClosedFormUpper, M::kNoConstraint, M::kRandomPhase})
    if (s == to_string(tag)) return tag;
  return std::nullopt;
}

enum class CaseTag { kCase1, kCase2 };

struct ScenarioConfig {
  CaseTag case_tag = CaseTag::kCase1;
  channel::ChannelModelConfig channel;

  int n_t = 32;
  int n_ris = 100;
  double gain_bs_dbi = 18.0;
  double gain_ris_dbi = 18.0;
  double gain_ue_dbi = 0.0;

  double bandwidth_hz = 100e6;
  double noise_dbm_per_hz = -174.0;
  double noise_figure_db = 10.0;

  double p_total_mw = 19952.62314968879;  // 43 dBm; Case 1 only
  double p_bar_mw = 0.005;

  std::vector<MethodTag> methods = {
      MethodTag::kRisOnly,       MethodTag::kDirectOnly,
      MethodTag::kFillDirectAo,  MethodTag::kFillDirectDft,
      MethodTag::kExhaustiveAo,  MethodTag::kClosedFormUpper,
      MethodTag::kNoConstraint,  MethodTag::kRandomPhase,
  };

  int trials = 200;
  std::uint64_t seed = 1;

  // Case 1 sweep: NIU x position in meters
  double niu_x_start = -75.0;
  double niu_x_stop = 75.0;
  double niu_x_step = 5.0;

  // Case 2 sweep: total transmit power in dBm
  double p_sweep_start_dbm = 30.0;
  double p_sweep_stop_dbm = 50.0;
  double p_sweep_step_dbm = 2.0;
  double aod_offset_rad = std::numbers::pi / 16.0;
  Vec2 ris_pos_case2{-70.0, 10.0};

  // Method-4 grid resolution relative to the alpha cap.
  double alpha_grid_step_rel = 1e-3;

  beamform::AoOptions ao;

  bool has_method(MethodTag tag) const {
    return std::find(methods.begin(), methods.end(), tag) != methods.end();
  }
  bool needs_ao() const {
    return has_method(MethodTag::kRisOnly) ||
           has_method(MethodTag::kFillDirectAo) ||
           has_method(MethodTag::kExhaustiveAo) ||
           has_method(MethodTag::kClosedFormUpper);
  }
  bool needs_dft() const {
    return has_method(MethodTag::kFillDirectDft) ||
           has_method(MethodTag::kFillDirectDftRisLeak);
  }
  bool needs_ris_niu_link() const {
    return has_method(MethodTag::kFillDirectDftRisLeak) ||
           channel.with_ris_niu_link;
  }

  double lambda_m() const { return kSpeedOfLightMps / (channel.fc_ghz * 1e9); }
  double noise_power_mw() const {
    return numerics::db_to_linear(noise_dbm_per_hz + noise_figure_db) *
           bandwidth_hz;
  }

  std::vector<double> sweep_values() const {
    const double start =
        case_tag == CaseTag::kCase1 ? niu_x_start : p_sweep_start_dbm;
    const double stop =
        case_tag == CaseTag::kCase1 ? niu_x_stop : p_sweep_stop_dbm;
    const double step =
        case_tag == CaseTag::kCase1 ? niu_x_step : p_sweep_step_dbm;
    std::vector<double> values;
    if (!(step > 0.0) || stop < start) return values;
    const auto count =
        static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    values.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
      values.push_back(start + static_cast<double>(i) * step);
    return values;
  }

  void validate() const {
    channel.validate();
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (methods.empty()) throw ConfigError("methods must be non-empty");
    for (std::size_t i = 0; i < methods.size(); ++i)
      for (std::size_t j = i + 1; j < methods.size(); ++j)
        if (methods[i] == methods[j])
          throw ConfigError(std::string("duplicate method: ") +
                            to_string(methods[i]));
    if (n_t < 1 || n_ris < 1) throw ConfigError("n_t and n_ris must be >= 1");
    if (needs_dft()) {
      const int s = static_cast<int>(
          std::lround(std::sqrt(static_cast<double>(n_ris))));
      if (s * s != n_ris)
        throw ConfigError("DFT methods require n_ris to be a perfect square");
    }
    if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth must be > 0");
    if (!(p_total_mw > 0.0)) throw ConfigError("p_total must be > 0");
    if (!(p_bar_mw > 0.0)) throw ConfigError("p_bar must be > 0");
    if (!(alpha_grid_step_rel > 0.0) || alpha_grid_step_rel > 1.0)
      throw ConfigError("alpha_grid_step must be in (0, 1]");
    if (ao.max_iters < 1) throw ConfigError("ao_max_iters must be >= 1");
    if (!(ao.rel_tol > 0.0)) throw ConfigError("ao_rel_tol must be > 0");
    const auto values = sweep_values();
    if (values.empty()) throw ConfigError("sweep grid is empty");
    if (case_tag == CaseTag::kCase1)
      for (double x : values)
        if (!(x > -80.0) || !(x < 80.0))
          throw ConfigError("niu_x must lie strictly between the BS (-80) "
                            "and the IU (80)");
  }
};

// Case 1: BS and IU at the ends of a 160 m segment, RIS elevated at the
// midpoint, NIU on the segment.
inline Geometry build_case1_geometry(double niu_x) {
  if (!(niu_x > -80.0) || !(niu_x < 80.0))
    throw GeometryError("case 1: niu_x must lie strictly inside (-80, 80)");
  Geometry g;
  g.bs = {-80.0, 0.0};
  g.iu = {80.0, 0.0};
  g.ris = {0.0, 50.0};
  g.niu = {niu_x, 0.0};
  return g;
}

// Case 2: IU 10 m from the BS, NIU at the same range rotated by the
// departure-angle offset, RIS nearby.
inline Geometry build_case2_geometry(double aod_offset_rad, Vec2 ris_pos) {
  Geometry g;
  g.bs = {-80.0, 0.0};
  g.iu = {-70.0, 0.0};
  const double d = channel::distance(g.bs, g.iu);
  g.niu = {g.bs.x + d * std::cos(aod_offset_rad),
           g.bs.y + d * std::sin(aod_offset_rad)};
  g.ris = ris_pos;
  return g;
}

struct MethodStats {
  double mean_rate_bps = 0.0;
  double stderr_bps = 0.0;
  std::int64_t violations = 0;
  std::int64_t valid_trials = 0;
};

struct SweepPoint {
  double sweep_value = 0.0;
  std::vector<MethodStats> per_method;
  std::int64_t invalid_trials = 0;
};

struct SweepResult {
  std::vector<MethodTag> methods;
  std::vector<SweepPoint> points;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;  // filled when the run is serialized
};

inline std::size_t method_index(const SweepResult& result, MethodTag tag) {
  for (std::size_t i = 0; i < result.methods.size(); ++i)
    if (result.methods[i] == tag) return i;
  throw ConfigError(std::string("method not in result: ") + to_string(tag));
}

struct TrialResult {
  std::vector<double> rate_bps;
  std::vector<std::uint8_t> violation;
  bool valid = true;
};

// One fading draw evaluated under every requested method.
inline TrialResult run_trial(const Geometry& geom, const ScenarioConfig& cfg,
                             const emfe::LinkBudget& budget, Rng& rng,
                             const beamform::Codebook* codebook = nullptr) {
  const auto& methods = cfg.methods;
  TrialResult out;
  out.rate_bps.assign(methods.size(), 0.0);
  out.violation.assign(methods.size(), 0);

  try {
    channel::ChannelModelConfig ccfg = cfg.channel;
    ccfg.with_ris_niu_link = cfg.needs_ris_niu_link();
    const channel::ChannelSet cs = channel::build_channel_set(geom, ccfg, rng);

    const CVector w_d = beamform::mrt_direct(cs.h_d);
    const double g_direct = std::norm(numerics::dot(cs.h_d, w_d));
    const double g_niu = std::norm(numerics::dot(cs.h_n, w_d));

    double g_ris_ao = 0.0;
    if (cfg.needs_ao()) {
      const auto ao = beamform::ao_optimize(cs.h_br, cs.h_ri, cfg.ao);
      g_ris_ao = ao.trace.back() * ao.trace.back();
    }

    std::optional<beamform::CodebookSelection> dft;
    double g_ris_dft = 0.0;
    if (cfg.needs_dft()) {
      beamform::Codebook local;
      const beamform::Codebook* cb = codebook;
      if (cb == nullptr) {
        local = beamform::dft_codebook(geom.n);
        cb = &local;
      }
      dft = beamform::codebook_select(cs.h_br, cs.h_ri, *cb);
      g_ris_dft = dft->best_power;
    }

    double g_ris_rand = 0.0;
    if (cfg.has_method(MethodTag::kRandomPhase)) {
      const auto phases = beamform::random_phases(geom.n, rng);
      g_ris_rand =
          channel::cascade_row(cs.h_ri, phases, cs.h_br).squared_norm();
    }

    std::optional<double> g_niu_ris;
    if (cfg.has_method(MethodTag::kFillDirectDftRisLeak)) {
      const CVector leak_row =
          channel::cascade_row(*cs.h_rn, dft->phases, cs.h_br);
      g_niu_ris = std::norm(numerics::dot(leak_row, dft->w_dft));
    }

    auto base_gains = [&](double g_ris) {
      emfe::EffectiveGains g;
      g.g_direct = g_direct;
      g.g_ris = g_ris;
      g.g_niu = g_niu;
      return g;
    };
    const emfe::AllocateOptions alloc_opts{cfg.alpha_grid_step_rel};

    for (std::size_t i = 0; i < methods.size(); ++i) {
      emfe::EffectiveGains gains;
      emfe::PowerSplit split;
      double rate = 0.0;
      bool constrained = true;
      switch (methods[i]) {
        case MethodTag::kRisOnly:
          gains = base_gains(g_ris_ao);
          split = emfe::allocate(emfe::Method::kRisOnly, budget, gains);
          rate = emfe::rate_single_codeword(split, gains, budget);
          break;
        case MethodTag::kDirectOnly:
          gains = base_gains(0.0);
          split = emfe::allocate(emfe::Method::kDirectOnly, budget, gains);
          rate = emfe::rate_single_codeword(split, gains, budget);
          break;
        case MethodTag::kFillDirectAo:
          gains = base_gains(g_ris_ao);
          split = emfe::allocate(emfe::Method::kFillDirect, budget, gains);
          rate = emfe::rate_single_codeword(split, gains, budget);
          break;
        case MethodTag::kFillDirectDft:
          gains = base_gains(g_ris_dft);
          split = emfe::allocate(emfe::Method::kFillDirect, budget, gains);
          rate = emfe::rate_single_codeword(split, gains, budget);
          break;
        case MethodTag::kFillDirectDftRisLeak:
          gains = base_gains(g_ris_dft);
          gains.g_niu_ris = g_niu_ris;
          split = emfe::allocate(emfe::Method::kFillDirect, budget, gains);
          rate = emfe::rate_single_codeword(split, gains, budget);
          break;
        case MethodTag::kExhaustiveAo:
          gains = base_gains(g_ris_ao);
          split = emfe::allocate(emfe::Method::kExhaustiveSplit, budget, gains,
                                 alloc_opts);
          rate = emfe::rate_single_codeword(split, gains, budget);
          break;
        case MethodTag::kClosedFormUpper:
          gains = base_gains(g_ris_ao);
          split = emfe::allocate(emfe::Method::kClosedFormSplit, budget, gains);
          rate = emfe::rate_multi_codeword(split, gains, budget);
          break;
        case MethodTag::kNoConstraint:
          gains = base_gains(0.0);
          split.p_d_mw = budget.p_total_mw;
          split.p_r_mw = 0.0;
          split.alpha = 1.0;
          split.method = emfe::Method::kDirectOnly;
          rate = emfe::rate_single_codeword(split, gains, budget);
          constrained = false;
          break;
        case MethodTag::kRandomPhase:
          gains = base_gains(g_ris_rand);
          split = emfe::allocate(emfe::Method::kFillDirect, budget, gains);
          rate = emfe::rate_single_codeword(split, gains, budget);
          break;
      }
      out.rate_bps[i] = rate;
      if (constrained)
        out.violation[i] =
            emfe::meets_exposure_limit(split, gains, budget) ? 0 : 1;
    }
  } catch (const DegenerateChannelError&) {
    out.valid = false;
  }
  return out;
}

// Geometry and link budget of one sweep point.
inline Geometry make_geometry(const ScenarioConfig& cfg, double sweep_value) {
  Geometry g = cfg.case_tag == CaseTag::kCase1
                   ? build_case1_geometry(sweep_value)
                   : build_case2_geometry(cfg.aod_offset_rad,
                                          cfg.ris_pos_case2);
  g.n_t = cfg.n_t;
  g.n = cfg.n_ris;
  g.gain_bs_dbi = cfg.gain_bs_dbi;
  g.gain_ris_dbi = cfg.gain_ris_dbi;
  g.gain_ue_dbi = cfg.gain_ue_dbi;
  return g;
}

inline emfe::LinkBudget make_budget(const ScenarioConfig& cfg,
                                    double sweep_value) {
  emfe::LinkBudget b;
  b.p_total_mw = cfg.case_tag == CaseTag::kCase1
                     ? cfg.p_total_mw
                     : numerics::db_to_linear(sweep_value);
  b.p_bar_mw = cfg.p_bar_mw;
  b.lambda_m = cfg.lambda_m();
  b.noise_power_mw = cfg.noise_power_mw();
  b.bandwidth_hz = cfg.bandwidth_hz;
  return b;
}

// Full Monte Carlo sweep. Per-trial RNGs depend only on (seed, trial
// index) and per-trial results land in preassigned slots, so the outcome
// is independent of the thread count.
inline SweepResult run_sweep(const ScenarioConfig& cfg, int threads = 1) {
  cfg.validate();
  const std::vector<double> values = cfg.sweep_values();

  beamform::Codebook cb;
  const beamform::Codebook* cbp = nullptr;
  if (cfg.needs_dft()) {
    cb = beamform::dft_codebook(cfg.n_ris);
    cbp = &cb;
  }

  SweepResult result;
  result.methods = cfg.methods;
  result.seed = cfg.seed;
  result.points.reserve(values.size());

  const int n_threads = std::max(1, threads);
  for (double value : values) {
    const Geometry geom = make_geometry(cfg, value);
    const emfe::LinkBudget budget = make_budget(cfg, value);

    std::vector<TrialResult> trials(static_cast<std::size_t>(cfg.trials));
    auto run_range = [&](int first, int stride) {
      for (int t = first; t < cfg.trials; t += stride) {
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
        trials[static_cast<std::size_t>(t)] =
            run_trial(geom, cfg, budget, rng, cbp);
      }
    };
    if (n_threads == 1 || cfg.trials == 1) {
      run_range(0, 1);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(
          static_cast<std::size_t>(n_threads));
      for (int w = 0; w < n_threads; ++w)
        pool.emplace_back([&, w]() {
          try {
            run_range(w, n_threads);
          } catch (...) {
            errors[static_cast<std::size_t>(w)] = std::current_exception();
          }
        });
      for (auto& th : pool) th.join();
      for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
    }

    SweepPoint point;
    point.sweep_value = value;
    point.per_method.resize(cfg.methods.size());
    for (const TrialResult& tr : trials)
      if (!tr.valid) ++point.invalid_trials;
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      MethodStats& stats = point.per_method[m];
      double sum = 0.0;
      for (const TrialResult& tr : trials) {
        if (!tr.valid) continue;
        sum += tr.rate_bps[m];
        stats.violations += tr.violation[m];
        ++stats.valid_trials;
      }
      if (stats.valid_trials > 0) {
        stats.mean_rate_bps = sum / static_cast<double>(stats.valid_trials);
        if (stats.valid_trials > 1) {
          double ss = 0.0;
          for (const TrialResult& tr : trials) {
            if (!tr.valid) continue;
            const double d = tr.rate_bps[m] - stats.mean_rate_bps;
            ss += d * d;
          }
          const double n = static_cast<double>(stats.valid_trials);
          stats.stderr_bps = std::sqrt(ss / (n - 1.0) / n);
        }
      }
    }
    result.points.push_back(std::move(point));
  }
  return result;
}

}  // namespace rislink::scenario
