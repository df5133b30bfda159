// Copyright 2026 The fabsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line harness: runs seeded scenarios coupling action source ->
// fabric -> plant, writes trajectory files, and analyzes them.
//
// Exit codes: 0 success and all audits pass, 1 usage/config error,
// 2 runtime numeric fault, 3 audit failure.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "fabsim/analysis.hpp"
#include "fabsim/io.hpp"
#include "fabsim/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitAudit = 3;

void emit_report(const fabsim::ordered_json& report, const std::string& out_path) {
  std::cout << report.dump() << "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::app);
    if (!out) throw fabsim::ConfigError("cannot open report file: " + out_path);
    out << report.dump() << "\n";
  }
}

int cmd_simulate(const std::string& config_path, bool seed_set, std::uint64_t seed,
                 const std::string& out_override) {
  fabsim::ScenarioConfig config = fabsim::load_scenario(config_path);
  if (seed_set) {
    config.seed = seed;
    config.config_hash = fabsim::config_hash_hex(config);
  }
  if (!out_override.empty()) config.output_path = out_override;
  const fabsim::RunResult result = fabsim::run_scenario_to_file(config, config.output_path);
  std::cout << fabsim::summary_to_json(result.summary).dump() << "\n";
  return result.summary.audits_clean() ? kExitOk : kExitAudit;
}

int cmd_batch(const std::string& config_path, const std::string& seed_range, int jobs,
              const std::string& out_dir) {
  const auto sep = seed_range.find("..");
  if (sep == std::string::npos) {
    throw fabsim::ConfigError("--seeds: expected range of the form a..b");
  }
  std::uint64_t first = 0;
  std::uint64_t last = 0;
  try {
    first = std::stoull(seed_range.substr(0, sep));
    last = std::stoull(seed_range.substr(sep + 2));
  } catch (const std::exception&) {
    throw fabsim::ConfigError("--seeds: expected range of the form a..b");
  }
  if (last < first) throw fabsim::ConfigError("--seeds: range end must be >= start");
  if (jobs <= 0) throw fabsim::ConfigError("--jobs: must be > 0");

  const fabsim::ScenarioConfig base = fabsim::load_scenario(config_path);
  const long count = static_cast<long>(last - first + 1);
  std::vector<fabsim::ordered_json> reports(count);
  std::vector<int> codes(count, kExitOk);
  std::atomic<long> cursor{0};
  std::mutex io_mutex;

  // One fabric+plant instance per worker; scenarios share nothing.
  const auto worker = [&]() {
    while (true) {
      const long index = cursor.fetch_add(1);
      if (index >= count) return;
      fabsim::ScenarioConfig config = base;
      config.seed = first + static_cast<std::uint64_t>(index);
      config.config_hash = fabsim::config_hash_hex(config);
      config.output_path = (std::filesystem::path(out_dir) /
                            (config.name + "_seed" + std::to_string(config.seed) + ".jsonl"))
                               .string();
      try {
        const fabsim::RunResult result =
            fabsim::run_scenario_to_file(config, config.output_path);
        reports[index] = fabsim::summary_to_json(result.summary);
        codes[index] = result.summary.audits_clean() ? kExitOk : kExitAudit;
      } catch (const fabsim::NumericFaultError& e) {
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cerr << "seed " << config.seed << ": numeric fault: " << e.what() << "\n";
        codes[index] = kExitNumeric;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cerr << "seed " << config.seed << ": " << e.what() << "\n";
        codes[index] = kExitConfig;
      }
    }
  };
  std::vector<std::thread> threads;
  for (int t = 0; t < std::min<long>(jobs, count); ++t) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();

  int worst = kExitOk;
  for (long i = 0; i < count; ++i) {
    if (!reports[i].is_null()) std::cout << reports[i].dump() << "\n";
    worst = std::max(worst, codes[i]);
  }
  return worst;
}

int cmd_analyze_spectrum(const std::vector<std::string>& files, double cutoff_hz,
                         const std::string& table_path, const std::string& out_path) {
  if (!table_path.empty() && files.size() != 1) {
    throw fabsim::ConfigError("--freq-table: requires exactly one input file");
  }
  for (const std::string& file : files) {
    const fabsim::Trajectory traj = fabsim::load_trajectory(file);
    fabsim::ordered_json per_joint = fabsim::ordered_json::array();
    std::ofstream table;
    if (!table_path.empty()) {
      table.open(table_path);
      if (!table) throw fabsim::ConfigError("cannot open table file: " + table_path);
      table << "joint,frequency_hz,amplitude\n";
    }
    double ratio_sum = 0.0;
    double high_total = 0.0;
    double amp_total = 0.0;
    for (int j = 0; j < traj.meta.dof; ++j) {
      std::vector<double> signal;
      signal.reserve(traj.rows.size());
      for (const auto& row : traj.rows) signal.push_back(row.fabric_q[j]);
      const auto spectrum =
          fabsim::amplitude_spectrum(signal, traj.meta.fabric_rate_hz);
      const double ratio = fabsim::high_freq_ratio(spectrum, cutoff_hz);
      per_joint.push_back(ratio);
      ratio_sum += ratio;
      for (const auto& p : spectrum) {
        amp_total += p.amplitude;
        if (p.frequency > cutoff_hz) high_total += p.amplitude;
        if (table.is_open()) {
          table << j << "," << p.frequency << "," << p.amplitude << "\n";
        }
      }
    }
    fabsim::ordered_json report;
    report["metric"] = "high_freq_ratio";
    report["file"] = file;
    report["cutoff_hz"] = cutoff_hz;
    report["per_joint"] = per_joint;
    report["mean"] = ratio_sum / traj.meta.dof;
    report["aggregate"] = amp_total > 0.0 ? high_total / amp_total : 0.0;
    emit_report(report, out_path);
  }
  return kExitOk;
}

int cmd_analyze_path(const std::string& file_a, const std::string& file_b,
                     const std::string& out_path) {
  const fabsim::Trajectory a = fabsim::load_trajectory(file_a);
  const fabsim::Trajectory b = fabsim::load_trajectory(file_b);
  fabsim::ordered_json report;
  report["metric"] = "path_consistency_rms_rad";
  report["file_a"] = file_a;
  report["file_b"] = file_b;
  report["value"] = fabsim::path_consistency_error(a, b);
  emit_report(report, out_path);
  return kExitOk;
}

int cmd_analyze_limits(const std::vector<std::string>& files, const std::string& out_path) {
  int code = kExitOk;
  for (const std::string& file : files) {
    const fabsim::Trajectory traj = fabsim::load_trajectory(file);
    const fabsim::LimitAuditReport audit = fabsim::limit_audit(traj);
    fabsim::ordered_json report;
    report["metric"] = "limit_audit";
    report["file"] = file;
    report["joint_violations"] = audit.joint_violations;
    report["accel_violations"] = audit.accel_violations;
    report["jerk_violations"] = audit.jerk_violations;
    report["min_lower_gap"] = fabsim::detail::vector_to_ordered_json(audit.min_lower_gap);
    report["min_upper_gap"] = fabsim::detail::vector_to_ordered_json(audit.min_upper_gap);
    report["worst_accel_margin"] = audit.worst_accel_margin;
    report["worst_jerk_margin"] = audit.worst_jerk_margin;
    emit_report(report, out_path);
    if (!audit.clean()) code = kExitAudit;
  }
  return code;
}

int cmd_analyze_energy(const std::vector<std::string>& files, const std::string& out_path) {
  for (const std::string& file : files) {
    const fabsim::Trajectory traj = fabsim::load_trajectory(file);
    const std::vector<double> energy = fabsim::energy_trace(traj);
    double max_abs = 0.0;
    for (double value : energy) max_abs = std::max(max_abs, std::abs(value - energy.front()));
    fabsim::ordered_json report;
    report["metric"] = "energy";
    report["file"] = file;
    report["initial"] = energy.front();
    report["final"] = energy.back();
    report["max_abs_drift"] = max_abs;
    report["max_rel_drift"] = energy.front() > 0.0 ? max_abs / energy.front() : 0.0;
    emit_report(report, out_path);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavioral-dynamics sandbox: forced energized fabric over a PD plant"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_override;
  CLI::App* simulate = app.add_subcommand("simulate", "Run one seeded scenario");
  simulate->add_option("--config", config_path, "Scenario config file")->required();
  simulate->add_option("--seed", seed, "Override the config seed")
      ->each([&seed_set](const std::string&) { seed_set = true; });
  simulate->add_option("--out", out_override, "Override the trajectory output path");

  std::string batch_config;
  std::string seed_range;
  int jobs = 1;
  std::string out_dir = "out";
  CLI::App* batch = app.add_subcommand("batch", "Run a range of seeds in parallel");
  batch->add_option("--config", batch_config, "Scenario config file")->required();
  batch->add_option("--seeds", seed_range, "Seed range a..b")->required();
  batch->add_option("--jobs", jobs, "Worker threads");
  batch->add_option("--out-dir", out_dir, "Directory for trajectory files");

  CLI::App* analyze = app.add_subcommand("analyze", "Analyze recorded trajectories");
  analyze->require_subcommand(1);
  std::vector<std::string> spectrum_files;
  double cutoff_hz = 5.0;
  std::string table_path;
  std::string report_path;
  CLI::App* spectrum = analyze->add_subcommand("spectrum", "Per-joint amplitude spectra");
  spectrum->add_option("files", spectrum_files, "Trajectory files")->required();
  spectrum->add_option("--cutoff-hz", cutoff_hz, "High-frequency cutoff");
  spectrum->add_option("--freq-table", table_path, "CSV of (joint, frequency, amplitude)");
  spectrum->add_option("--out", report_path, "Append reports to this file");

  std::vector<std::string> path_files;
  CLI::App* path = analyze->add_subcommand("path-consistency", "Arc-length path RMS");
  path->add_option("files", path_files, "Exactly two trajectory files")
      ->expected(2)
      ->required();
  path->add_option("--out", report_path, "Append reports to this file");

  std::vector<std::string> limit_files;
  CLI::App* limits = analyze->add_subcommand("limits", "Joint/accel/jerk audit");
  limits->add_option("files", limit_files, "Trajectory files")->required();
  limits->add_option("--out", report_path, "Append reports to this file");

  std::vector<std::string> energy_files;
  CLI::App* energy = analyze->add_subcommand("energy", "Fabric kinetic-energy trace");
  energy->add_option("files", energy_files, "Trajectory files")->required();
  energy->add_option("--out", report_path, "Append reports to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, seed_set, seed, out_override);
    if (batch->parsed()) return cmd_batch(batch_config, seed_range, jobs, out_dir);
    if (spectrum->parsed()) {
      return cmd_analyze_spectrum(spectrum_files, cutoff_hz, table_path, report_path);
    }
    if (path->parsed()) return cmd_analyze_path(path_files[0], path_files[1], report_path);
    if (limits->parsed()) return cmd_analyze_limits(limit_files, report_path);
    if (energy->parsed()) return cmd_analyze_energy(energy_files, report_path);
  } catch (const fabsim::NumericFaultError& e) {
    std::cerr << "numeric fault";
    if (e.step_index() >= 0) std::cerr << " at step " << e.step_index();
    std::cerr << ": " << e.what() << "\n";
    return kExitNumeric;
  } catch (const fabsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
