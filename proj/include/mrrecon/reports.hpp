#pragma once

#include "mrrecon/simulator.hpp"

#include <iosfwd>
#include <span>
#include <string>

namespace mrrecon {

// Deterministic per-cycle metrics; wall-clock timings are kept out of it.
void write_metrics_csv(const RunResult& result, std::ostream& out);
void write_timings_csv(const RunResult& result, std::ostream& out);
std::string summary_json(const RunResult& result);

/// One row per run: coverage, residual uncertainty, path length, views,
/// reconstruction tasks and total stage timings.
void write_comparison_csv(std::span<const RunResult> results, std::ostream& out);
std::string comparison_table(std::span<const RunResult> results);

}  // namespace mrrecon
