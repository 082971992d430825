// SPDX-License-Identifier: Apache-2.0
//
// Exposure model at the non-intended user, the direct-link power budget it
// induces, the five power-allocation methods, and the rate evaluators.
//
// Conventions: powers are linear milliwatts, channel gains are the
// dimensionless |h w|^2 of unit-norm precoders, and the received exposure
// at the NIU is (4 pi / lambda) * P_tx * gain.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "rislink/errors.hpp"

namespace rislink::emfe {

struct LinkBudget {
  double p_total_mw = 0.0;      // total BS transmit power
  double p_bar_mw = 0.0;        // exposure ceiling at the NIU
  double lambda_m = 0.0;        // carrier wavelength
  double noise_power_mw = 0.0;  // bandwidth * N0 * noise figure
  double bandwidth_hz = 0.0;

  void validate() const {
    if (!(p_total_mw > 0.0) || !(p_bar_mw > 0.0) || !(lambda_m > 0.0) ||
        !(noise_power_mw > 0.0) || !(bandwidth_hz > 0.0))
      throw ConfigError("LinkBudget: all fields must be > 0");
  }
};

enum class Method {
  kRisOnly,          // all power on the cascaded link
  kDirectOnly,       // all (budget-capped) power on the direct link
  kFillDirect,       // fill the direct link to its budget, rest to the RIS
  kExhaustiveSplit,  // grid search over the split factor
  kClosedFormSplit,  // analytic split for the per-link-codeword rate
};

enum class RateObjective { kSingleCodeword, kMultiCodeword };

struct PowerSplit {
  double p_d_mw = 0.0;
  double p_r_mw = 0.0;
  double alpha = 0.0;  // p_d / p_total
  Method method = Method::kRisOnly;
};

// Effective scalar gains of one realization under fixed beams.
struct EffectiveGains {
  double g_direct = 0.0;  // |h_d w_d|^2
  double g_ris = 0.0;     // |h_ri diag(e^{j phi}) h_br w_r|^2
  double g_niu = 0.0;     // |h_n w_d|^2, exposure gain of the direct beam
  // exposure gain of the RIS cascade toward the NIU; present only when the
  // leakage variant is enabled
  std::optional<double> g_niu_ris;
};

inline double emfe_received_power(double p_tx_mw, double g_niu,
                                  double lambda_m) {
  if (!(lambda_m > 0.0))
    throw ConfigError("emfe_received_power: lambda must be > 0");
  if (p_tx_mw < 0.0 || g_niu < 0.0)
    throw DomainError("emfe_received_power: negative input");
  return 4.0 * std::numbers::pi / lambda_m * p_tx_mw * g_niu;
}

// Largest direct-link transmit power that keeps the NIU's received power
// at or below the ceiling; capped at the total power.
inline double emfe_power_budget(const LinkBudget& budget, double g_niu) {
  budget.validate();
  if (g_niu < 0.0) throw DomainError("emfe_power_budget: negative gain");
  if (g_niu == 0.0) return budget.p_total_mw;
  const double cap =
      budget.p_bar_mw * budget.lambda_m / (4.0 * std::numbers::pi * g_niu);
  return std::min(budget.p_total_mw, cap);
}

namespace detail {
inline constexpr double kInvLn2 = 1.4426950408889634;  // 1/ln 2
inline double log2_1p(double x) {
  if (!(x >= 0.0)) throw DomainError("rate: negative SNR term");
  return std::log1p(x) * kInvLn2;
}
}  // namespace detail

// Single-codeword rate: both links carry the same stream, powers add in
// the SINR.
inline double rate_single_codeword(const PowerSplit& split,
                                   const EffectiveGains& gains,
                                   const LinkBudget& budget) {
  const double snr = (split.p_d_mw * gains.g_direct + split.p_r_mw * gains.g_ris) /
                     budget.noise_power_mw;
  return budget.bandwidth_hz * detail::log2_1p(snr);
}

// Per-link-codeword rate: independent streams on the two links, so the
// two capacities add. Always >= the single-codeword rate of the same split.
inline double rate_multi_codeword(const PowerSplit& split,
                                  const EffectiveGains& gains,
                                  const LinkBudget& budget) {
  const double snr_d = split.p_d_mw * gains.g_direct / budget.noise_power_mw;
  const double snr_r = split.p_r_mw * gains.g_ris / budget.noise_power_mw;
  return budget.bandwidth_hz *
         (detail::log2_1p(snr_d) + detail::log2_1p(snr_r));
}

// d/d alpha of the per-link-codeword rate with p_d = alpha P,
// p_r = (1-alpha) P, written in the SNR coefficients c1 = g_ris/noise,
// c2 = g_direct/noise. Its unique root is the unconstrained optimum of
// closed_form_alpha.
inline double multi_codeword_rate_derivative(double alpha, double p_total_mw,
                                             double c1, double c2,
                                             double bandwidth_hz) {
  const double t_direct = 1.0 + alpha * p_total_mw * c2;
  const double t_ris = 1.0 + (1.0 - alpha) * p_total_mw * c1;
  if (!(t_direct > 0.0) || !(t_ris > 0.0))
    throw DomainError("multi_codeword_rate_derivative: log argument <= 0");
  return bandwidth_hz * detail::kInvLn2 *
         (p_total_mw * c2 / t_direct - p_total_mw * c1 / t_ris);
}

struct ClosedFormAlpha {
  double alpha = 0.0;
  bool degenerate = false;  // a vanishing link made the split trivial
};

// Analytic maximizer of the per-link-codeword rate over the split factor,
// clamped to [0, min(alpha_cap, 1)].
inline ClosedFormAlpha closed_form_alpha(double p_total_mw, double c1,
                                         double c2, double alpha_cap) {
  if (!(alpha_cap >= 0.0) || !(alpha_cap <= 1.0))
    throw DomainError("closed_form_alpha: cap must be in [0, 1]");
  if (!(p_total_mw > 0.0))
    throw DomainError("closed_form_alpha: p_total must be > 0");
  if (c1 <= 0.0) return {alpha_cap, true};  // no RIS term: boundary optimal
  if (c2 <= 0.0) return {0.0, true};        // no direct term
  const double p = p_total_mw;
  const double unconstrained =
      (p * c2 - p * c1 + p * p * c1 * c2) / (2.0 * p * p * c1 * c2);
  return {std::clamp(std::min(alpha_cap, unconstrained), 0.0, 1.0), false};
}

// Exhaustive scan of the split factor over {0, step, 2 step, ...} up to
// alpha_cap, plus the cap itself; lowest alpha wins ties.
inline double grid_search_alpha(const LinkBudget& budget,
                                const EffectiveGains& gains, double alpha_cap,
                                double step, RateObjective objective) {
  budget.validate();
  if (!(step > 0.0)) throw ConfigError("grid_search_alpha: step must be > 0");
  if (!(alpha_cap >= 0.0) || !(alpha_cap <= 1.0))
    throw ConfigError("grid_search_alpha: cap must be in [0, 1]");
  if (alpha_cap / step > 2e7)
    throw ConfigError("grid_search_alpha: grid too fine");

  auto evaluate = [&](double alpha) {
    PowerSplit s;
    s.alpha = alpha;
    s.p_d_mw = alpha * budget.p_total_mw;
    s.p_r_mw = (1.0 - alpha) * budget.p_total_mw;
    s.method = Method::kExhaustiveSplit;
    return objective == RateObjective::kSingleCodeword
               ? rate_single_codeword(s, gains, budget)
               : rate_multi_codeword(s, gains, budget);
  };

  double best_alpha = 0.0;
  double best_value = evaluate(0.0);
  for (std::size_t k = 1;; ++k) {
    const double alpha = static_cast<double>(k) * step;
    if (alpha > alpha_cap) break;
    const double v = evaluate(alpha);
    if (v > best_value) {
      best_value = v;
      best_alpha = alpha;
    }
  }
  if (alpha_cap > 0.0) {
    const double v = evaluate(alpha_cap);
    if (v > best_value) best_alpha = alpha_cap;
  }
  return best_alpha;
}

// Total received power at the NIU for a split: the direct beam always
// contributes; the RIS cascade contributes when the leakage gain is
// present.
inline double total_niu_exposure(const PowerSplit& split,
                                 const EffectiveGains& gains,
                                 const LinkBudget& budget) {
  double e = emfe_received_power(split.p_d_mw, gains.g_niu, budget.lambda_m);
  if (gains.g_niu_ris)
    e += emfe_received_power(split.p_r_mw, *gains.g_niu_ris, budget.lambda_m);
  return e;
}

inline bool meets_exposure_limit(const PowerSplit& split,
                                 const EffectiveGains& gains,
                                 const LinkBudget& budget,
                                 double slack = 1e-9) {
  return total_niu_exposure(split, gains, budget) <=
         budget.p_bar_mw * (1.0 + slack);
}

struct AllocateOptions {
  // Method-4 grid resolution as a fraction of the cap (absolute fallback
  // when the cap is zero).
  double grid_step_rel = 1e-3;
};

// Power split for one method under one realization's gains. The leakage
// variant is active whenever gains.g_niu_ris is present: the RIS power is
// then budgeted against the same ceiling, jointly with the direct term.
inline PowerSplit allocate(Method method, const LinkBudget& budget,
                           const EffectiveGains& gains,
                           const AllocateOptions& opts = {}) {
  budget.validate();
  if (gains.g_direct < 0.0 || gains.g_ris < 0.0 || gains.g_niu < 0.0 ||
      (gains.g_niu_ris && *gains.g_niu_ris < 0.0))
    throw DomainError("allocate: negative gain");
  if (gains.g_niu_ris && (method == Method::kExhaustiveSplit ||
                          method == Method::kClosedFormSplit))
    throw ConfigError(
        "allocate: the leakage-aware ceiling is only defined for the "
        "fixed-priority methods");

  const double p = budget.p_total_mw;
  const double direct_cap = emfe_power_budget(budget, gains.g_niu);
  // exposure budget in (power x gain) units: p_tx * g must stay below this
  const double exposure_cap =
      budget.p_bar_mw * budget.lambda_m / (4.0 * std::numbers::pi);
  const double g_leak =
      gains.g_niu_ris && *gains.g_niu_ris > 0.0 ? *gains.g_niu_ris : 0.0;

  PowerSplit split;
  split.method = method;
  switch (method) {
    case Method::kRisOnly:
      split.p_d_mw = 0.0;
      split.p_r_mw = g_leak > 0.0 ? std::min(p, exposure_cap / g_leak) : p;
      break;
    case Method::kDirectOnly:
      split.p_d_mw = direct_cap;
      split.p_r_mw = 0.0;
      break;
    case Method::kFillDirect: {
      if (g_leak == 0.0) {
        split.p_d_mw = direct_cap;
        split.p_r_mw = p - split.p_d_mw;
      } else if (gains.g_niu > g_leak) {
        // largest p_d such that p_d g_niu + (P - p_d) g_leak fits the cap
        const double p_d_max =
            (exposure_cap - p * g_leak) / (gains.g_niu - g_leak);
        if (p_d_max >= 0.0) {
          split.p_d_mw = std::min(p, p_d_max);
          split.p_r_mw = p - split.p_d_mw;
        } else {
          // full power infeasible even with p_d = 0: shed RIS power
          split.p_d_mw = 0.0;
          split.p_r_mw = std::min(p, exposure_cap / g_leak);
        }
      } else {
        // leakage at least as exposing as the direct beam: fill direct
        // against its own cap, then give the RIS what headroom remains
        split.p_d_mw = direct_cap;
        const double headroom =
            std::max(0.0, exposure_cap - split.p_d_mw * gains.g_niu);
        split.p_r_mw = std::min(p - split.p_d_mw, headroom / g_leak);
      }
      break;
    }
    case Method::kExhaustiveSplit: {
      const double cap = std::clamp(direct_cap / p, 0.0, 1.0);
      const double step =
          cap > 0.0 ? cap * opts.grid_step_rel : opts.grid_step_rel;
      const double alpha = grid_search_alpha(budget, gains, cap, step,
                                             RateObjective::kSingleCodeword);
      split.p_d_mw = alpha * p;
      split.p_r_mw = (1.0 - alpha) * p;
      break;
    }
    case Method::kClosedFormSplit: {
      const double cap = std::clamp(direct_cap / p, 0.0, 1.0);
      const double c1 = gains.g_ris / budget.noise_power_mw;
      const double c2 = gains.g_direct / budget.noise_power_mw;
      const double alpha = closed_form_alpha(p, c1, c2, cap).alpha;
      split.p_d_mw = alpha * p;
      split.p_r_mw = (1.0 - alpha) * p;
      break;
    }
    default:
      throw ConfigError("allocate: unknown method");
  }
  split.alpha = split.p_d_mw / p;
  return split;
}

}  // namespace rislink::emfe
