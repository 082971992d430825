// SPDX-License-Identifier: Apache-2.0
//
// Configuration ingestion and result serialization. Config documents are
// plain "key = value" text: '#' starts a comment, lists use [a, b, c],
// unknown keys are rejected with their line number. Power may be given in
// mW or dBm through distinct keys; the resolved form always uses mW.
//
// A run manifest is itself a valid config document (metadata lives in
// comment lines), so re-running from a manifest reproduces the run.

#pragma once

#include <charconv>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rislink/errors.hpp"
#include "rislink/scenario.hpp"
#include "rislink/version.hpp"

namespace rislink::cli {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view v, int line) {
  double out = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    throw ParseError("expected a number, got '" + std::string(v) + "'", line);
  return out;
}

inline std::int64_t parse_int(std::string_view v, int line) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ParseError("expected an integer, got '" + std::string(v) + "'",
                     line);
  return out;
}

inline std::uint64_t parse_u64(std::string_view v, int line) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ParseError("expected an unsigned integer, got '" + std::string(v) +
                         "'",
                     line);
  return out;
}

inline bool parse_bool(std::string_view v, int line) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ParseError("expected true/false, got '" + std::string(v) + "'", line);
}

// Angles accept a plain radian value or the shorthands pi/16 and pi/8.
inline double parse_angle(std::string_view v, int line) {
  if (v == "pi/16") return std::numbers::pi / 16.0;
  if (v == "pi/8") return std::numbers::pi / 8.0;
  return parse_double(v, line);
}

inline std::vector<std::string> parse_list(std::string_view v, int line) {
  v = trim(v);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    throw ParseError("expected a [a, b, ...] list", line);
  v.remove_prefix(1);
  v.remove_suffix(1);
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= v.size()) {
    std::size_t comma = v.find(',', start);
    std::string_view item = comma == std::string_view::npos
                                ? v.substr(start)
                                : v.substr(start, comma - start);
    item = trim(item);
    if (!item.empty()) items.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

inline std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

inline std::string format_sig9(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

}  // namespace detail

// Apply a config document on top of an existing (e.g. preset) config.
// Throws ParseError with line context on malformed text, unknown keys,
// or unit conflicts.
inline void apply_config_text(scenario::ScenarioConfig& cfg,
                              const std::string& text) {
  using scenario::CaseTag;
  using channel::FadingModel;

  std::map<std::string, int> seen;  // key -> first line, for conflicts
  auto mark = [&](const std::string& key, const char* rival, int line) {
    seen[key] = line;
    auto it = seen.find(rival);
    if (it != seen.end())
      throw ParseError("'" + key + "' conflicts with '" + rival +
                           "' given on line " + std::to_string(it->second),
                       line);
  };

  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("expected 'key = value'", line_no);
    const std::string key{detail::trim(line.substr(0, eq))};
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("missing key before '='", line_no);
    if (value.empty()) throw ParseError("missing value for '" + key + "'",
                                        line_no);
    if (seen.count(key))
      throw ParseError("duplicate key '" + key + "' (first on line " +
                           std::to_string(seen[key]) + ")",
                       line_no);
    seen[key] = line_no;

    if (key == "case") {
      if (value == "case1") cfg.case_tag = CaseTag::kCase1;
      else if (value == "case2") cfg.case_tag = CaseTag::kCase2;
      else throw ParseError("case must be case1 or case2", line_no);
    } else if (key == "model") {
      if (value == "rayleigh") cfg.channel.model = FadingModel::kRayleigh;
      else if (value == "multipath") cfg.channel.model = FadingModel::kMultipath;
      else throw ParseError("model must be rayleigh or multipath", line_no);
    } else if (key == "n_t") {
      cfg.n_t = static_cast<int>(detail::parse_int(value, line_no));
    } else if (key == "n_ris") {
      cfg.n_ris = static_cast<int>(detail::parse_int(value, line_no));
    } else if (key == "fc_ghz") {
      cfg.channel.fc_ghz = detail::parse_double(value, line_no);
    } else if (key == "bandwidth_mhz") {
      cfg.bandwidth_hz = detail::parse_double(value, line_no) * 1e6;
    } else if (key == "noise_dbm_per_hz") {
      cfg.noise_dbm_per_hz = detail::parse_double(value, line_no);
    } else if (key == "noise_figure_db") {
      cfg.noise_figure_db = detail::parse_double(value, line_no);
    } else if (key == "gain_bs_dbi") {
      cfg.gain_bs_dbi = detail::parse_double(value, line_no);
    } else if (key == "gain_ris_dbi") {
      cfg.gain_ris_dbi = detail::parse_double(value, line_no);
    } else if (key == "gain_ue_dbi") {
      cfg.gain_ue_dbi = detail::parse_double(value, line_no);
    } else if (key == "p_total_mw") {
      mark(key, "p_total_dbm", line_no);
      cfg.p_total_mw = detail::parse_double(value, line_no);
    } else if (key == "p_total_dbm") {
      mark(key, "p_total_mw", line_no);
      cfg.p_total_mw =
          numerics::db_to_linear(detail::parse_double(value, line_no));
    } else if (key == "p_bar_mw") {
      mark(key, "p_bar_dbm", line_no);
      cfg.p_bar_mw = detail::parse_double(value, line_no);
    } else if (key == "p_bar_dbm") {
      mark(key, "p_bar_mw", line_no);
      cfg.p_bar_mw =
          numerics::db_to_linear(detail::parse_double(value, line_no));
    } else if (key == "shadowing_sigma_db") {
      cfg.channel.shadowing_sigma_db = detail::parse_double(value, line_no);
    } else if (key == "independent_ris_shadowing") {
      cfg.channel.independent_ris_shadowing = detail::parse_bool(value, line_no);
    } else if (key == "n_paths") {
      cfg.channel.n_paths = static_cast<int>(detail::parse_int(value, line_no));
    } else if (key == "aod_range_rad") {
      cfg.channel.aod_range_rad = detail::parse_angle(value, line_no);
    } else if (key == "methods") {
      std::vector<scenario::MethodTag> methods;
      for (const std::string& item : detail::parse_list(value, line_no)) {
        const auto tag = scenario::parse_method_tag(item);
        if (!tag) throw ParseError("unknown method '" + item + "'", line_no);
        methods.push_back(*tag);
      }
      cfg.methods = std::move(methods);
    } else if (key == "trials") {
      cfg.trials = static_cast<int>(detail::parse_int(value, line_no));
    } else if (key == "seed") {
      cfg.seed = detail::parse_u64(value, line_no);
    } else if (key == "alpha_grid_step") {
      cfg.alpha_grid_step_rel = detail::parse_double(value, line_no);
    } else if (key == "ao_max_iters") {
      cfg.ao.max_iters = static_cast<int>(detail::parse_int(value, line_no));
    } else if (key == "ao_rel_tol") {
      cfg.ao.rel_tol = detail::parse_double(value, line_no);
    } else if (key == "niu_x_start") {
      cfg.niu_x_start = detail::parse_double(value, line_no);
    } else if (key == "niu_x_stop") {
      cfg.niu_x_stop = detail::parse_double(value, line_no);
    } else if (key == "niu_x_step") {
      cfg.niu_x_step = detail::parse_double(value, line_no);
    } else if (key == "p_sweep_start_dbm") {
      cfg.p_sweep_start_dbm = detail::parse_double(value, line_no);
    } else if (key == "p_sweep_stop_dbm") {
      cfg.p_sweep_stop_dbm = detail::parse_double(value, line_no);
    } else if (key == "p_sweep_step_dbm") {
      cfg.p_sweep_step_dbm = detail::parse_double(value, line_no);
    } else if (key == "aod_offset_rad") {
      cfg.aod_offset_rad = detail::parse_angle(value, line_no);
    } else if (key == "ris_placement") {
      if (value == "close") cfg.ris_pos_case2 = {-70.0, 10.0};
      else if (value == "far") cfg.ris_pos_case2 = {-30.0, 10.0};
      else throw ParseError("ris_placement must be close or far", line_no);
    } else if (key == "ris_x") {
      cfg.ris_pos_case2.x = detail::parse_double(value, line_no);
    } else if (key == "ris_y") {
      cfg.ris_pos_case2.y = detail::parse_double(value, line_no);
    } else {
      throw ParseError("unknown key '" + key + "'", line_no);
    }
  }
}

// Parse a document against the library defaults (an empty document yields
// the default Case 1 configuration).
inline scenario::ScenarioConfig parse_config(const std::string& text) {
  scenario::ScenarioConfig cfg;
  apply_config_text(cfg, text);
  cfg.validate();
  return cfg;
}

// Canonical resolved form: every key materialized, powers in mW, doubles
// in shortest round-trip notation. parse_config(emit_config(c)) == c.
inline std::string emit_config(const scenario::ScenarioConfig& cfg) {
  using detail::format_double;
  std::ostringstream out;
  out << "case = "
      << (cfg.case_tag == scenario::CaseTag::kCase1 ? "case1" : "case2")
      << '\n';
  out << "model = "
      << (cfg.channel.model == channel::FadingModel::kRayleigh ? "rayleigh"
                                                               : "multipath")
      << '\n';
  out << "n_t = " << cfg.n_t << '\n';
  out << "n_ris = " << cfg.n_ris << '\n';
  out << "fc_ghz = " << format_double(cfg.channel.fc_ghz) << '\n';
  out << "bandwidth_mhz = " << format_double(cfg.bandwidth_hz / 1e6) << '\n';
  out << "noise_dbm_per_hz = " << format_double(cfg.noise_dbm_per_hz) << '\n';
  out << "noise_figure_db = " << format_double(cfg.noise_figure_db) << '\n';
  out << "gain_bs_dbi = " << format_double(cfg.gain_bs_dbi) << '\n';
  out << "gain_ris_dbi = " << format_double(cfg.gain_ris_dbi) << '\n';
  out << "gain_ue_dbi = " << format_double(cfg.gain_ue_dbi) << '\n';
  out << "p_total_mw = " << format_double(cfg.p_total_mw) << '\n';
  out << "p_bar_mw = " << format_double(cfg.p_bar_mw) << '\n';
  out << "shadowing_sigma_db = "
      << format_double(cfg.channel.shadowing_sigma_db) << '\n';
  out << "independent_ris_shadowing = "
      << (cfg.channel.independent_ris_shadowing ? "true" : "false") << '\n';
  out << "n_paths = " << cfg.channel.n_paths << '\n';
  out << "aod_range_rad = " << format_double(cfg.channel.aod_range_rad)
      << '\n';
  out << "methods = [";
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    if (i) out << ", ";
    out << scenario::to_string(cfg.methods[i]);
  }
  out << "]\n";
  out << "trials = " << cfg.trials << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "alpha_grid_step = " << format_double(cfg.alpha_grid_step_rel)
      << '\n';
  out << "ao_max_iters = " << cfg.ao.max_iters << '\n';
  out << "ao_rel_tol = " << format_double(cfg.ao.rel_tol) << '\n';
  out << "niu_x_start = " << format_double(cfg.niu_x_start) << '\n';
  out << "niu_x_stop = " << format_double(cfg.niu_x_stop) << '\n';
  out << "niu_x_step = " << format_double(cfg.niu_x_step) << '\n';
  out << "p_sweep_start_dbm = " << format_double(cfg.p_sweep_start_dbm)
      << '\n';
  out << "p_sweep_stop_dbm = " << format_double(cfg.p_sweep_stop_dbm) << '\n';
  out << "p_sweep_step_dbm = " << format_double(cfg.p_sweep_step_dbm) << '\n';
  out << "aod_offset_rad = " << format_double(cfg.aod_offset_rad) << '\n';
  out << "ris_x = " << format_double(cfg.ris_pos_case2.x) << '\n';
  out << "ris_y = " << format_double(cfg.ris_pos_case2.y) << '\n';
  return out.str();
}

inline std::uint64_t config_hash(const scenario::ScenarioConfig& cfg) {
  // FNV-1a 64 over the canonical form
  const std::string text = emit_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Scenario presets for the three reference experiments.
inline scenario::ScenarioConfig preset(const std::string& name) {
  using M = scenario::MethodTag;
  scenario::ScenarioConfig cfg;
  if (name == "fig4") {
    cfg.p_bar_mw = 0.005;
    cfg.methods = {M::kRisOnly,        M::kDirectOnly,
                   M::kFillDirectAo,   M::kFillDirectDft,
                   M::kFillDirectDftRisLeak, M::kExhaustiveAo,
                   M::kClosedFormUpper, M::kNoConstraint, M::kRandomPhase};
  } else if (name == "fig5") {
    cfg.p_bar_mw = 0.5;
    cfg.methods = {M::kRisOnly,         M::kDirectOnly,   M::kFillDirectAo,
                   M::kFillDirectDft,   M::kExhaustiveAo, M::kClosedFormUpper,
                   M::kNoConstraint,    M::kRandomPhase};
  } else if (name == "fig6") {
    cfg.case_tag = scenario::CaseTag::kCase2;
    cfg.channel.model = channel::FadingModel::kMultipath;
    cfg.p_bar_mw = 0.1;
    cfg.methods = {M::kRisOnly, M::kDirectOnly, M::kFillDirectDft};
    cfg.aod_offset_rad = std::numbers::pi / 16.0;
    cfg.ris_pos_case2 = {-70.0, 10.0};
  } else {
    throw ConfigError("unknown preset '" + name +
                      "'; valid presets: fig4, fig5, fig6");
  }
  return cfg;
}

// CSV: one row per sweep point in ascending order, one
// (rate, stderr, violations) triplet per method, 9 significant digits.
inline std::string emit_csv(const scenario::SweepResult& result) {
  std::ostringstream out;
  out << "sweep_value";
  for (scenario::MethodTag tag : result.methods) {
    const char* name = scenario::to_string(tag);
    out << ',' << name << "_rate_bps," << name << "_stderr," << name
        << "_violations";
  }
  out << '\n';

  std::vector<std::size_t> order(result.points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.points[a].sweep_value < result.points[b].sweep_value;
  });

  for (std::size_t i : order) {
    const scenario::SweepPoint& p = result.points[i];
    out << detail::format_sig9(p.sweep_value);
    for (const scenario::MethodStats& s : p.per_method)
      out << ',' << detail::format_sig9(s.mean_rate_bps) << ','
          << detail::format_sig9(s.stderr_bps) << ',' << s.violations;
    out << '\n';
  }
  return out.str();
}

// Reproduction record: metadata as comments, then the resolved config.
inline std::string emit_manifest(const scenario::ScenarioConfig& cfg,
                                 const scenario::SweepResult& result,
                                 const std::string& started_utc,
                                 const std::string& finished_utc,
                                 double elapsed_seconds) {
  std::int64_t invalid = 0;
  for (const auto& p : result.points) invalid += p.invalid_trials;
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016" PRIx64,
                config_hash(cfg));
  std::ostringstream out;
  out << "# rislink run manifest\n";
  out << "# version: " << kVersion << '\n';
  out << "# started-utc: " << started_utc << '\n';
  out << "# finished-utc: " << finished_utc << '\n';
  out << "# elapsed-seconds: " << detail::format_double(elapsed_seconds)
      << '\n';
  out << "# config-hash: " << hash_hex << '\n';
  out << "# invalid-trials-total: " << invalid << '\n';
  out << emit_config(cfg);
  return out.str();
}

}  // namespace rislink::cli
