#include "mrrecon/reports.hpp"

#include <json.hpp>

#include <cstdio>
#include <ostream>
#include <sstream>

namespace mrrecon {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct StageTotals {
  double task = 0.0;
  double colla = 0.0;
  double plan = 0.0;
};

StageTotals totals(const RunResult& r) {
  StageTotals t;
  for (const CycleTiming& c : r.timings) {
    t.task += c.task_seconds;
    t.colla += c.collaboration_seconds;
    t.plan += c.planning_seconds;
  }
  return t;
}

}  // namespace

void write_metrics_csv(const RunResult& result, std::ostream& out) {
  const std::size_t robots = result.cycles.empty() ? 0 : result.cycles.front().path_lengths.size();
  out << "cycle,views,coverage,residual_uncertainty,frontiers,gated_instances,"
         "exploration_tasks,reconstruction_tasks,robots_exploration,robots_reconstruction,"
         "cluster_objective,tour_objective,collisions";
  for (std::size_t r = 0; r < robots; ++r) out << ",path_length_" << r;
  out << "\n";
  for (const CycleRecord& c : result.cycles) {
    out << c.cycle << ',' << c.views << ',' << num(c.coverage) << ','
        << num(c.residual_uncertainty) << ',' << c.frontiers << ',' << c.gated_instances << ','
        << c.exploration_tasks << ',' << c.reconstruction_tasks << ',' << c.robots_exploration
        << ',' << c.robots_reconstruction << ',' << num(c.cluster_objective) << ','
        << num(c.tour_objective) << ',' << c.collisions;
    for (double l : c.path_lengths) out << ',' << num(l);
    out << "\n";
  }
}

void write_timings_csv(const RunResult& result, std::ostream& out) {
  out << "cycle,task_seconds,collaboration_seconds,planning_seconds\n";
  for (const CycleTiming& t : result.timings) {
    out << t.cycle << ',' << num(t.task_seconds) << ',' << num(t.collaboration_seconds) << ','
        << num(t.planning_seconds) << "\n";
  }
}

std::string summary_json(const RunResult& result) {
  nlohmann::json paths = nlohmann::json::array();
  if (!result.cycles.empty()) {
    for (double l : result.cycles.back().path_lengths) paths.push_back(l);
  }
  nlohmann::json doc = {
      {"variant", to_string(result.variant)},
      {"stop_reason", result.stop_reason},
      {"cycles", result.cycles.empty() ? 0 : result.cycles.back().cycle},
      {"views", result.views},
      {"coverage", result.coverage},
      {"residual_uncertainty", result.residual_uncertainty},
      {"total_path_length", result.total_path_length},
      {"path_lengths", paths},
      {"reconstruction_tasks", result.reconstruction_tasks},
      {"collisions", result.cycles.empty() ? 0 : result.cycles.back().collisions},
  };
  return doc.dump(2) + "\n";
}

void write_comparison_csv(std::span<const RunResult> results, std::ostream& out) {
  out << "variant,views,coverage,residual_uncertainty,total_path_length,reconstruction_tasks,"
         "task_seconds,collaboration_seconds,planning_seconds\n";
  for (const RunResult& r : results) {
    const StageTotals t = totals(r);
    out << to_string(r.variant) << ',' << r.views << ',' << num(r.coverage) << ','
        << num(r.residual_uncertainty) << ',' << num(r.total_path_length) << ','
        << r.reconstruction_tasks << ',' << num(t.task) << ',' << num(t.colla) << ','
        << num(t.plan) << "\n";
  }
}

std::string comparison_table(std::span<const RunResult> results) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %6s %9s %10s %9s %6s %8s %8s %8s\n", "variant", "views",
                "coverage", "residual", "path_m", "rec", "T_task", "T_colla", "T_plan");
  out << line;
  for (const RunResult& r : results) {
    const StageTotals t = totals(r);
    std::snprintf(line, sizeof line, "%-24s %6d %9.4f %10.5f %9.2f %6d %8.3f %8.3f %8.3f\n",
                  to_string(r.variant), r.views, r.coverage, r.residual_uncertainty,
                  r.total_path_length, r.reconstruction_tasks, t.task, t.colla, t.plan);
    out << line;
  }
  return out.str();
}

}  // namespace mrrecon
