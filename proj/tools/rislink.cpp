// SPDX-License-Identifier: Apache-2.0
//
// Command-line entry point: resolve a scenario from a preset and/or a
// config file, run the Monte Carlo sweep, and write <out>.csv plus
// <out>.manifest. Exit codes: 0 success, 1 configuration error, 2 runtime
// error.

#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "rislink/cli.hpp"
#include "rislink/scenario.hpp"
#include "rislink/version.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw rislink::ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string utc_now_iso8601() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-assisted downlink simulator with an exposure ceiling "
               "at a non-intended user"};
  app.set_version_flag("--version", std::string(rislink::kVersion));

  std::string config_path;
  std::string preset_name;
  std::string out_base = "rislink_out";
  std::string threads_arg = "auto";
  std::uint64_t seed = 0;
  int trials = 0;
  app.add_option("--config", config_path, "config file (key = value lines)");
  app.add_option("--preset", preset_name, "scenario preset: fig4, fig5, fig6");
  app.add_option("--seed", seed, "master seed (overrides config)");
  app.add_option("--trials", trials, "trials per sweep point (overrides config)");
  app.add_option("--threads", threads_arg, "worker threads, or 'auto'");
  app.add_option("--out", out_base, "output base path (<out>.csv, <out>.manifest)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    rislink::scenario::ScenarioConfig cfg;
    if (!preset_name.empty()) cfg = rislink::cli::preset(preset_name);
    if (!config_path.empty())
      rislink::cli::apply_config_text(cfg, read_file(config_path));
    if (app.count("--seed") > 0) cfg.seed = seed;
    if (app.count("--trials") > 0) cfg.trials = trials;
    cfg.validate();

    int threads = 1;
    if (threads_arg == "auto") {
      threads = static_cast<int>(std::thread::hardware_concurrency());
      if (threads < 1) threads = 1;
    } else {
      try {
        threads = std::stoi(threads_arg);
      } catch (const std::exception&) {
        throw rislink::ConfigError("--threads expects a number or 'auto'");
      }
      if (threads < 1)
        throw rislink::ConfigError("--threads must be >= 1");
    }

    const std::string started = utc_now_iso8601();
    const auto t0 = std::chrono::steady_clock::now();
    rislink::scenario::SweepResult result = rislink::scenario::run_sweep(cfg, threads);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const std::string finished = utc_now_iso8601();
    result.config_hash = rislink::cli::config_hash(cfg);

    write_file(out_base + ".csv", rislink::cli::emit_csv(result));
    write_file(out_base + ".manifest",
               rislink::cli::emit_manifest(cfg, result, started, finished, elapsed));

    std::int64_t invalid = 0;
    for (const auto& p : result.points) invalid += p.invalid_trials;
    std::cout << "wrote " << out_base << ".csv and " << out_base
              << ".manifest\n"
              << result.points.size() << " sweep points x " << cfg.trials
              << " trials, " << cfg.methods.size() << " methods, "
              << invalid << " invalid trials, " << elapsed << " s with "
              << threads << " thread(s)\n";
    return 0;
  } catch (const rislink::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const rislink::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }
}
