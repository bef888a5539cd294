// Copyright 2026 The aggsched Authors.
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

// aggsched: plan and simulate aggregation schedules.
//
//   aggsched run <config.json> [--out DIR] [--seed N] [--planners LIST]
//                              [--oracle] [--format csv|json|both]
//   aggsched sweep <config.json> --axis path=v1,v2,... [--out DIR] ...
//
// Exit status: 0 success, 2 configuration error, 3 invariant violation,
// 1 anything else.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aggsched/error.h"
#include "aggsched/experiment.h"
#include "aggsched/report.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

struct CommonOptions {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> planners;
  bool oracle = false;
  std::string format = "both";
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("config", o.config, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Output directory (overrides output_dir)");
  cmd->add_option("--seed", o.seed, "Seed (overrides the config and $AGGSCHED_SEED)");
  cmd->add_option("--planners", o.planners,
                  "Comma-separated planners, e.g. grasp,repart,loom:5");
  cmd->add_flag("--oracle", o.oracle, "Also run the optimal-tree oracle");
  cmd->add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"csv", "json", "both"}));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw aggsched::ConfigError("", path + ": cannot read config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Folds command-line overrides into the JSON document so that sweeps see
// them too.
std::string apply_overrides(std::string doc, const CommonOptions& o) {
  using aggsched::set_config_value;
  if (o.seed) doc = set_config_value(doc, "seed", std::to_string(*o.seed));
  if (o.out) doc = set_config_value(doc, "output_dir", "\"" + *o.out + "\"");
  if (o.planners || o.oracle) {
    std::vector<std::string> names;
    if (o.planners) {
      std::stringstream ss(*o.planners);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) names.push_back(item);
      }
    } else {
      for (const auto& p : aggsched::parse_config(doc).planners) {
        names.push_back(p.name());
      }
    }
    if (o.oracle &&
        std::find(names.begin(), names.end(), "oracle") == names.end()) {
      names.push_back("oracle");
    }
    std::string list = "[";
    for (std::size_t i = 0; i < names.size(); ++i) {
      list += (i ? ",\"" : "\"") + names[i] + "\"";
    }
    doc = set_config_value(doc, "planners", list + "]");
  }
  return doc;
}

aggsched::ReportFormat parse_format(const std::string& f) {
  if (f == "csv") return aggsched::ReportFormat::kCsv;
  if (f == "json") return aggsched::ReportFormat::kJson;
  return aggsched::ReportFormat::kBoth;
}

int run(const CommonOptions& o) {
  const std::filesystem::path base =
      std::filesystem::path(o.config).parent_path();
  const std::string doc = apply_overrides(read_file(o.config), o);
  const aggsched::ExperimentConfig cfg = aggsched::parse_config(doc, base);
  const aggsched::SimReport report = aggsched::run_experiment(cfg);
  aggsched::emit_report(report, cfg.output_dir, parse_format(o.format));
  std::cout << aggsched::summary_csv(report);
  return 0;
}

int sweep(const CommonOptions& o, const std::string& axis_text) {
  const std::filesystem::path base =
      std::filesystem::path(o.config).parent_path();
  const std::string doc = apply_overrides(read_file(o.config), o);
  const aggsched::SweepAxis axis = aggsched::SweepAxis::parse(axis_text);
  const aggsched::ExperimentConfig cfg = aggsched::parse_config(doc, base);
  const aggsched::SweepResult result = aggsched::run_sweep(doc, axis, base);
  std::filesystem::create_directories(cfg.output_dir);
  const std::string csv = aggsched::sweep_csv(result);
  aggsched::write_text_file(cfg.output_dir / "sweep.csv", csv);
  const auto format = parse_format(o.format);
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    aggsched::emit_report(result.reports[i],
                          cfg.output_dir / (axis.path + "=" + axis.values[i]),
                          format);
  }
  std::cout << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plan and simulate aggregation schedules"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one experiment");
  add_common(run_cmd, run_opts);

  CommonOptions sweep_opts;
  std::string axis;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Run an experiment once per axis value");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--axis", axis, "Axis, e.g. workload.jaccard=0,0.5,1")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) return run(run_opts);
    return sweep(sweep_opts, axis);
  } catch (const aggsched::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const aggsched::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
