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

#include "aggsched/report.h"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace aggsched {

using nlohmann::json;

std::string format_cost(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace {

const char* direction_name(LinkInterval::Direction d) {
  return d == LinkInterval::Direction::kUp ? "up" : "down";
}

json plan_json(const AggregationPlan& plan) {
  json phases = json::array();
  for (const Phase& phase : plan.phases) {
    json p = json::array();
    for (const Transfer& t : phase) {
      p.push_back({{"source", t.source},
                   {"destination", t.destination},
                   {"partition", t.partition}});
    }
    phases.push_back(std::move(p));
  }
  return phases;
}

}  // namespace

std::string summary_csv(const SimReport& report) {
  std::string out =
      "planner,planned_cost,realized_cost,phases,dest_tuples,planning_time\n";
  for (const PlannerReport& p : report.planners) {
    out += p.planner + "," + format_cost(p.planned_cost) + "," +
           format_cost(p.realized_cost) + "," +
           std::to_string(p.plan.phases.size()) + "," +
           std::to_string(p.dest_tuples) + "," +
           format_cost(p.planning_seconds) + "\n";
  }
  return out;
}

std::string timeline_csv(const PlannerReport& planner) {
  std::string out = "link_id,direction,start,end,tuples\n";
  for (const LinkInterval& i : planner.timeline) {
    out += std::to_string(i.link) + "," + direction_name(i.direction) + "," +
           format_cost(i.start) + "," + format_cost(i.end) + "," +
           std::to_string(i.tuples) + "\n";
  }
  return out;
}

std::string report_json(const SimReport& report) {
  json planners = json::array();
  json plans = json::object();
  for (const PlannerReport& p : report.planners) {
    planners.push_back({{"planner", p.planner},
                        {"planned_cost", p.planned_cost},
                        {"realized_cost", p.realized_cost},
                        {"phases", p.plan.phases.size()},
                        {"phase_costs", p.phase_costs},
                        {"destination_tuples", p.destination_tuples},
                        {"dest_tuples", p.dest_tuples},
                        {"planning_time", p.planning_seconds}});
    plans[p.planner] = plan_json(p.plan);
  }
  json doc = {{"node_count", report.node_count},
              {"partition_count", report.partition_count},
              {"seed", report.seed},
              {"input_tuples", report.input_tuples},
              {"planners", std::move(planners)},
              {"plans", std::move(plans)}};
  return doc.dump(2) + "\n";
}

std::string sweep_csv(const SweepResult& sweep) {
  std::string out =
      "axis_value,planner,planned_cost,realized_cost,phases,dest_tuples,"
      "speedup\n";
  for (const SweepRow& row : sweep.rows) {
    const PlannerReport& p = row.report;
    out += row.axis_value + "," + p.planner + "," +
           format_cost(p.planned_cost) + "," + format_cost(p.realized_cost) +
           "," + std::to_string(p.plan.phases.size()) + "," +
           std::to_string(p.dest_tuples) + "," +
           (row.speedup ? format_cost(*row.speedup) : std::string()) + "\n";
  }
  return out;
}

std::filesystem::path write_text_file(const std::filesystem::path& path,
                                      const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << content;
  out.close();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
  return path;
}

std::vector<std::filesystem::path> emit_report(const SimReport& report,
                                               const std::filesystem::path& dir,
                                               ReportFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error(dir.string() + ": cannot create directory: " +
                             ec.message());
  }
  std::vector<std::filesystem::path> written;
  if (format != ReportFormat::kJson) {
    written.push_back(write_text_file(dir / "summary.csv", summary_csv(report)));
    for (const PlannerReport& p : report.planners) {
      written.push_back(write_text_file(dir / ("timeline_" + p.planner + ".csv"),
                                        timeline_csv(p)));
    }
  }
  if (format != ReportFormat::kCsv) {
    written.push_back(write_text_file(dir / "report.json", report_json(report)));
  }
  return written;
}

std::vector<std::pair<std::string, AggregationPlan>> plans_from_report_json(
    const std::string& json_text) {
  const json doc = json::parse(json_text);
  std::vector<std::pair<std::string, AggregationPlan>> out;
  const json& plans = doc.at("plans");
  for (const json& p : doc.at("planners")) {
    const std::string name = p.at("planner").get<std::string>();
    AggregationPlan plan;
    for (const json& phase : plans.at(name)) {
      Phase ph;
      for (const json& t : phase) {
        ph.push_back({t.at("source").get<NodeId>(),
                      t.at("destination").get<NodeId>(),
                      t.at("partition").get<PartitionId>()});
      }
      plan.phases.push_back(std::move(ph));
    }
    out.emplace_back(name, std::move(plan));
  }
  return out;
}

}  // namespace aggsched
