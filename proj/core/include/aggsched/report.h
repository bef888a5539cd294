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

#ifndef AGGSCHED_REPORT_H_
#define AGGSCHED_REPORT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "aggsched/experiment.h"

namespace aggsched {

enum class ReportFormat { kCsv, kJson, kBoth };

// Six significant digits; integral values keep a trailing ".0".
std::string format_cost(double v);

// planner,planned_cost,realized_cost,phases,dest_tuples,planning_time
std::string summary_csv(const SimReport& report);
// link_id,direction,start,end,tuples
std::string timeline_csv(const PlannerReport& planner);
std::string report_json(const SimReport& report);
// axis_value,planner,planned_cost,realized_cost,phases,dest_tuples,speedup
std::string sweep_csv(const SweepResult& sweep);

// Writes summary.csv and timeline_<planner>.csv (csv) and/or report.json
// (json) into `dir`, creating it. Returns the written paths. I/O failures
// throw std::runtime_error naming the path.
std::vector<std::filesystem::path> emit_report(const SimReport& report,
                                               const std::filesystem::path& dir,
                                               ReportFormat format);

std::filesystem::path write_text_file(const std::filesystem::path& path,
                                      const std::string& content);

// Parses the "plans" section of report_json back into plans, keyed by
// planner name in report order.
std::vector<std::pair<std::string, AggregationPlan>> plans_from_report_json(
    const std::string& json_text);

}  // namespace aggsched

#endif  // AGGSCHED_REPORT_H_
