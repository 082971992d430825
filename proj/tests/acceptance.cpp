// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Runs every shipping criterion at its stated
// tolerance and prints one PASS/FAIL line per criterion; exits non-zero if
// any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rislink/beamforming.hpp"
#include "rislink/channel.hpp"
#include "rislink/cli.hpp"
#include "rislink/emfe_power.hpp"
#include "rislink/numerics.hpp"
#include "rislink/rng.hpp"
#include "rislink/scenario.hpp"

using namespace rislink;
using numerics::CMatrix;
using numerics::CVector;
using scenario::MethodTag;

namespace {

struct Criterion {
  int id;
  std::string title;
  bool pass;
  std::string detail;
};

std::vector<Criterion> g_results;

void report(int id, const std::string& title, bool pass,
            const std::string& detail) {
  g_results.push_back({id, title, pass, detail});
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. closed-form split factor vs exhaustive search

void criterion_closed_form_vs_grid() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double p = std::pow(10.0, rng.uniform(-1.0, 4.0));
    const double c1 = std::pow(10.0, rng.uniform(-6.0, 3.0));
    const double c2 = std::pow(10.0, rng.uniform(-6.0, 3.0));
    const double cap = rng.uniform();
    const emfe::LinkBudget budget{p, 1.0, 1.0, 1.0, 1e8};
    emfe::EffectiveGains gains;
    gains.g_direct = c2;
    gains.g_ris = c1;
    const double closed = emfe::closed_form_alpha(p, c1, c2, cap).alpha;
    const double grid = emfe::grid_search_alpha(
        budget, gains, cap, 1e-4, emfe::RateObjective::kMultiCodeword);
    worst = std::max(worst, std::abs(closed - grid));
  }
  const double dt = elapsed_s(t0);
  report(1, "closed-form power split matches exhaustive search",
         worst <= 1e-4 && dt < 10.0,
         "max |closed - grid| = " + fmt(worst) + " over 1000 draws, " +
             fmt(dt) + " s");
}

// ---------------------------------------------------------------------------
// 2. analytic rate derivative vs central finite differences, and its root

void criterion_rate_derivative() {
  Rng rng(1002);
  const double bw = 1e8;
  const double inv_ln2 = 1.4426950408889634;

  double worst_rel = 0.0;
  int accepted = 0;
  int attempts = 0;
  while (accepted < 1000 && attempts < 100000) {
    ++attempts;
    const double p = 1.0;
    const double c1 = std::pow(10.0, rng.uniform(-3.0, 3.0));
    const double c2 = std::pow(10.0, rng.uniform(-3.0, 3.0));
    const double alpha = rng.uniform(0.05, 0.95);
    const double t1 = p * c2 / (1.0 + alpha * p * c2);
    const double t2 = p * c1 / (1.0 + (1.0 - alpha) * p * c1);
    const double an =
        emfe::multi_codeword_rate_derivative(alpha, p, c1, c2, bw);
    if (std::abs(an) < 1e-2 * bw * inv_ln2 * (t1 + t2)) continue;  // near root
    ++accepted;

    const emfe::LinkBudget budget{p, 1.0, 1.0, 1.0, bw};
    emfe::EffectiveGains gains;
    gains.g_direct = c2;
    gains.g_ris = c1;
    auto rate_at = [&](double a) {
      emfe::PowerSplit s{a * p, (1.0 - a) * p, a,
                         emfe::Method::kExhaustiveSplit};
      return emfe::rate_multi_codeword(s, gains, budget);
    };
    const double h = 1e-6;
    const double fd = (rate_at(alpha + h) - rate_at(alpha - h)) / (2.0 * h);
    worst_rel = std::max(worst_rel, std::abs(fd - an) / std::abs(an));
  }

  double worst_root = 0.0;
  int roots = 0;
  for (int i = 0; i < 2000; ++i) {
    const double p = std::pow(10.0, rng.uniform(-1.0, 3.0));
    const double c1 = std::pow(10.0, rng.uniform(-2.0, 2.0));
    const double c2 = std::pow(10.0, rng.uniform(-2.0, 2.0));
    const double root =
        (p * c2 - p * c1 + p * p * c1 * c2) / (2.0 * p * p * c1 * c2);
    if (!(root > 1e-3 && root < 1.0 - 1e-3)) continue;
    ++roots;
    const double d = emfe::multi_codeword_rate_derivative(root, p, c1, c2, bw);
    const double scale = bw * inv_ln2 *
                         (p * c2 / (1.0 + root * p * c2) +
                          p * c1 / (1.0 + (1.0 - root) * p * c1));
    worst_root = std::max(worst_root, std::abs(d) / scale);
  }

  report(2, "rate derivative matches finite differences and vanishes at its root",
         accepted == 1000 && worst_rel <= 1e-6 && roots >= 100 &&
             worst_root < 1e-9,
         "max rel err = " + fmt(worst_rel) + " on 1000 points; |d|/scale = " +
             fmt(worst_root) + " at " + std::to_string(roots) + " roots");
}

// ---------------------------------------------------------------------------
// 3. single-codeword objective with a better direct link fills to the cap

void criterion_boundary_split() {
  Rng rng(1003);
  int exact = 0;
  const int total = 500;
  for (int i = 0; i < total; ++i) {
    const double p = std::pow(10.0, rng.uniform(-1.0, 3.0));
    const double c1 = std::pow(10.0, rng.uniform(-3.0, 2.0));
    const double c2 = c1 * (1.0 + std::pow(10.0, rng.uniform(-2.0, 2.0)));
    const double cap = std::max(rng.uniform(), 1e-6);
    const emfe::LinkBudget budget{p, 1.0, 1.0, 1.0, 1e8};
    emfe::EffectiveGains gains;
    gains.g_direct = c2;
    gains.g_ris = c1;
    const double a = emfe::grid_search_alpha(
        budget, gains, cap, 1e-3, emfe::RateObjective::kSingleCodeword);
    if (a == cap) ++exact;
  }
  report(3, "better direct link drives the grid split to the cap exactly",
         exact == total,
         std::to_string(exact) + "/" + std::to_string(total) + " at the cap");
}

// ---------------------------------------------------------------------------
// 4. alternating optimization: monotone trace, scalar optimum, random oracle

void criterion_ao() {
  Rng rng(1004);
  bool monotone = true;
  for (int i = 0; i < 100; ++i) {
    const CMatrix h_br = oracle::random_cmatrix(16, 8, rng);
    const CVector h_ri = oracle::random_cvector(16, rng);
    const auto sol = beamform::ao_optimize(h_br, h_ri);
    for (std::size_t t = 1; t < sol.trace.size(); ++t)
      if (sol.trace[t] < sol.trace[t - 1] * (1.0 - 1e-12)) monotone = false;
  }

  double worst_scalar = 0.0;
  for (int i = 0; i < 50; ++i) {
    CMatrix h_br(1, 1);
    h_br(0, 0) = rng.cgaussian();
    const CVector h_ri{rng.cgaussian()};
    const auto sol = beamform::ao_optimize(h_br, h_ri);
    const double expected = std::abs(h_ri[0]) * std::abs(h_br(0, 0));
    worst_scalar =
        std::max(worst_scalar, std::abs(sol.trace.back() - expected));
  }

  int oracle_wins = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const CMatrix h_br = oracle::random_cmatrix(16, 8, rng);
    const CVector h_ri = oracle::random_cvector(16, rng);
    const double ao = beamform::ao_optimize(h_br, h_ri).trace.back();
    double best = 0.0;
    for (int d = 0; d < 10000; ++d) {
      const auto phases = beamform::random_phases(16, rng);
      const CVector g = channel::cascade_row(h_ri, phases, h_br);
      const CVector w = oracle::random_unit_vector(8, rng);
      best = std::max(best, std::abs(numerics::dot(g, w)));
    }
    if (best > ao) ++oracle_wins;
  }

  report(4, "alternating optimization is monotone and beats random search",
         monotone && worst_scalar <= 1e-9 && oracle_wins == 0,
         std::string("trace monotone: ") + (monotone ? "yes" : "NO") +
             ", scalar alignment err = " + fmt(worst_scalar) +
             ", random-search wins = " + std::to_string(oracle_wins) + "/20");
}

// ---------------------------------------------------------------------------
// 5. codebook structure and selection

void criterion_codebook() {
  double worst_gram = 0.0;
  for (int n : {4, 16, 64, 100}) {
    const auto cb = beamform::dft_codebook(n);
    for (std::size_t i = 0; i < cb.n; ++i)
      for (std::size_t j = 0; j < cb.n; ++j) {
        std::complex<double> g{};
        for (std::size_t m = 0; m < cb.n; ++m)
          g += std::conj(cb.cols(m, i)) * cb.cols(m, j);
        const std::complex<double> want =
            i == j ? std::complex<double>(static_cast<double>(n), 0.0)
                   : std::complex<double>{};
        worst_gram = std::max(worst_gram, std::abs(g - want));
      }
  }

  Rng rng(1005);
  const auto cb = beamform::dft_codebook(16);
  int mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    const CMatrix h_br = oracle::random_cmatrix(16, 8, rng);
    const CVector h_ri = oracle::random_cvector(16, rng);
    const auto sel = beamform::codebook_select(h_br, h_ri, cb);

    std::size_t best = 0;
    double best_power = -1.0;
    for (std::size_t c = 0; c < cb.n; ++c) {
      CVector row(h_br.cols());
      for (std::size_t k = 0; k < cb.n; ++k)
        for (std::size_t j = 0; j < h_br.cols(); ++j)
          row[j] += h_ri[k] * cb.cols(k, c) * h_br(k, j);
      if (row.squared_norm() > best_power) {
        best_power = row.squared_norm();
        best = c;
      }
    }
    if (sel.best_index != best) ++mismatches;
  }

  report(5, "DFT codebook is orthogonal and selection is the exhaustive argmax",
         worst_gram <= 1e-9 && mismatches == 0,
         "max gram deviation = " + fmt(worst_gram) + ", selection mismatches = " +
             std::to_string(mismatches) + "/100");
}

// ---------------------------------------------------------------------------
// 6-9. preset sweeps

const scenario::MethodStats& stats_at(const scenario::SweepResult& r,
                                      std::size_t point, MethodTag tag) {
  return r.points[point].per_method[scenario::method_index(r, tag)];
}

void criterion_exposure_feasibility(const scenario::SweepResult& fig4) {
  std::int64_t violations = 0;
  std::int64_t invalid = 0;
  for (const auto& point : fig4.points) {
    invalid += point.invalid_trials;
    for (std::size_t m = 0; m < fig4.methods.size(); ++m) {
      if (fig4.methods[m] == MethodTag::kNoConstraint) continue;
      violations += point.per_method[m].violations;
    }
  }
  report(6, "no constrained method ever exceeds the exposure ceiling",
         violations == 0,
         std::to_string(violations) + " violations, " +
             std::to_string(invalid) + " invalid trials across the sweep");
}

void criterion_figure_ordering(const scenario::SweepResult& fig4,
                               const scenario::SweepResult& fig5) {
  std::ostringstream why;
  bool pass = true;
  auto check_chain = [&](const scenario::SweepResult& r, const char* name) {
    for (std::size_t p = 0; p < r.points.size(); ++p) {
      const auto& nc = stats_at(r, p, MethodTag::kNoConstraint);
      const auto& m5 = stats_at(r, p, MethodTag::kClosedFormUpper);
      const auto& m4 = stats_at(r, p, MethodTag::kExhaustiveAo);
      const auto& m3 = stats_at(r, p, MethodTag::kFillDirectAo);
      const auto& dft = stats_at(r, p, MethodTag::kFillDirectDft);
      const auto& rnd = stats_at(r, p, MethodTag::kRandomPhase);
      const double x = r.points[p].sweep_value;

      auto fail = [&](const std::string& msg) {
        if (pass) why << name << " @ x=" << x << ": " << msg;
        pass = false;
      };
      if (nc.mean_rate_bps < m5.mean_rate_bps)
        fail("no-constraint " + fmt(nc.mean_rate_bps) + " < m5 " +
             fmt(m5.mean_rate_bps));
      if (m5.mean_rate_bps < m4.mean_rate_bps)
        fail("m5 < m4");
      if (m4.mean_rate_bps < m3.mean_rate_bps)
        fail("m4 < m3-ao");
      const double se = 2.0 * std::sqrt(m3.stderr_bps * m3.stderr_bps +
                                        dft.stderr_bps * dft.stderr_bps);
      if (m3.mean_rate_bps < dft.mean_rate_bps - se)
        fail("m3-ao below m3-dft by more than 2 SE");
      if (rnd.mean_rate_bps > m3.mean_rate_bps)
        fail("random-phase above the AO method");
    }
  };
  check_chain(fig4, "fig4");
  check_chain(fig5, "fig5");
  report(7, "figure-level method ordering holds at every sweep point", pass,
         pass ? "no-constraint >= m5 >= m4-ao >= m3-ao, m3-ao ~ m3-dft, "
                "random <= AO on fig4 and fig5"
              : why.str());
}

void criterion_saturation(const scenario::SweepResult& fig6) {
  const std::size_t last = fig6.points.size() - 1;
  std::ostringstream why;
  bool pass = true;

  // direct-only: non-decreasing, then flat once the ceiling binds
  double prev = -1.0;
  for (std::size_t p = 0; p < fig6.points.size(); ++p) {
    const auto& m2 = stats_at(fig6, p, MethodTag::kDirectOnly);
    if (m2.mean_rate_bps < prev * (1.0 - 1e-12)) {
      pass = false;
      why << "direct-only decreases at point " << p << "; ";
    }
    prev = m2.mean_rate_bps;
  }
  const auto& m2_final = stats_at(fig6, last, MethodTag::kDirectOnly);
  std::size_t sat = last;
  for (std::size_t p = 0; p < fig6.points.size(); ++p) {
    const auto& m2 = stats_at(fig6, p, MethodTag::kDirectOnly);
    if (m2.mean_rate_bps >=
        m2_final.mean_rate_bps - 2.0 * m2_final.stderr_bps) {
      sat = p;
      break;
    }
  }
  if (sat >= last) {
    pass = false;
    why << "direct-only never saturates before the last point; ";
  } else {
    for (std::size_t p = sat; p <= last; ++p) {
      const auto& m2 = stats_at(fig6, p, MethodTag::kDirectOnly);
      if (std::abs(m2.mean_rate_bps - m2_final.mean_rate_bps) >
          2.0 * (m2.stderr_bps + m2_final.stderr_bps)) {
        pass = false;
        why << "direct-only not flat after saturation at point " << p << "; ";
      }
    }
    for (MethodTag tag : {MethodTag::kRisOnly, MethodTag::kFillDirectDft}) {
      const auto& at_sat = stats_at(fig6, sat, tag);
      const auto& at_end = stats_at(fig6, last, tag);
      const double se = std::sqrt(at_sat.stderr_bps * at_sat.stderr_bps +
                                  at_end.stderr_bps * at_end.stderr_bps);
      if (at_end.mean_rate_bps < at_sat.mean_rate_bps + 2.0 * se) {
        pass = false;
        why << scenario::to_string(tag)
            << " stops growing after the direct link saturates; ";
      }
    }
  }
  report(8, "direct-only saturates with power while RIS methods keep growing",
         pass,
         pass ? "saturation from sweep index " + std::to_string(sat) +
                    " of " + std::to_string(last)
              : why.str());
}

void criterion_determinism(const scenario::SweepResult& fig6_t2) {
  const auto cfg = cli::preset("fig6");
  const auto again_t2 = scenario::run_sweep(cfg, 2);
  const auto with_t1 = scenario::run_sweep(cfg, 1);
  const std::string a = cli::emit_csv(fig6_t2);
  const std::string b = cli::emit_csv(again_t2);
  const std::string c = cli::emit_csv(with_t1);
  report(9, "same seed gives byte-identical CSV regardless of thread count",
         a == b && b == c,
         a == b ? (b == c ? "identical across re-run and 1 vs 2 threads"
                          : "thread count changed the output")
                : "re-run with the same seed changed the output");
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();

  criterion_closed_form_vs_grid();
  criterion_rate_derivative();
  criterion_boundary_split();
  criterion_ao();
  criterion_codebook();

  const auto fig4 = scenario::run_sweep(cli::preset("fig4"), 2);
  const auto fig5 = scenario::run_sweep(cli::preset("fig5"), 2);
  const auto fig6 = scenario::run_sweep(cli::preset("fig6"), 2);

  criterion_exposure_feasibility(fig4);
  criterion_figure_ordering(fig4, fig5);
  criterion_saturation(fig6);
  criterion_determinism(fig6);

  int failures = 0;
  for (const auto& c : g_results) {
    if (!c.pass) ++failures;
    std::printf("%s  [%d] %s (%s)\n", c.pass ? "PASS" : "FAIL", c.id,
                c.title.c_str(), c.detail.c_str());
  }
  std::printf("%d/%zu criteria passed in %.1f s\n",
              static_cast<int>(g_results.size()) - failures, g_results.size(),
              elapsed_s(t0));
  return failures == 0 ? 0 : 1;
}
