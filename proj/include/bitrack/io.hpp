#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "bitrack/dynamics.hpp"
#include "bitrack/sim_engine.hpp"

namespace bitrack {

using Json = nlohmann::json;

// Graph file format (1-based indices): {"n": 3, "edges": [[i, j, w], ...]
// meaning weight w on (v_j -> v_i), "leader": [[i, w], ...]}.
SignedDigraph graph_from_json(const Json& j);
Json graph_to_json(const SignedDigraph& g);

// Dense matrix: either a bare array of rows or {"matrix": [[...], ...]}.
Matrix matrix_from_json(const Json& j);
Json matrix_to_json(const Matrix& m);

// Scenario configs. Unknown keys are rejected.
ScenarioSpec spec_from_json(const Json& j);
Json spec_to_json(const ScenarioSpec& spec);

Json classification_to_json(const Classification& c);
Json bound_report_to_json(const SpectralBoundReport& r);
Json product_report_to_json(const ProductContractionReport& r);
Json gate_report_to_json(const GateReport& r);
Json verdict_to_json(const ConvergenceVerdict& v);
Json monte_carlo_to_json(const MonteCarloResult& m);

// Schedules / processes, replayable bit-exactly.
Json schedule_to_json(const AsyncSchedule& s);
AsyncSchedule schedule_from_json(const Json& j);

// Trace CSV: k, t, x0_1..p, v0_1..p, per-follower x_i_*, v_i_*, err norms.
void trace_to_csv(const SimulationTrace& trace, const ScenarioSpec& spec, std::ostream& os,
                  int flush_every = 1000);

// Plot data (column per series) plus a small gnuplot script.
std::string trace_plot_data(const SimulationTrace& trace, const ScenarioSpec& spec);
std::string trace_plot_script(const ScenarioSpec& spec, const std::string& data_file);

Json load_json_file(const std::filesystem::path& path);
// Write-to-temp-then-rename.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace bitrack
