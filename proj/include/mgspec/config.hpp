#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mgspec/asymptotics.hpp"
#include "mgspec/matching_conditions.hpp"
#include "mgspec/metric_graph.hpp"

namespace mgspec {

/// A fully parsed and validated problem: graph, conditions and options.
/// Config files are JSON documents with top-level keys "edges" plus exactly
/// one of "vertices" (per-vertex presets) or "raw_conditions" (projector
/// matrices, row-major [re, im] pairs), and optional "solver" / "sweep"
/// option blocks. Unknown keys are rejected.
struct ProblemConfig {
    MetricGraph graph;
    MatchingConditions conditions;

    std::optional<double> window_lo;
    std::optional<double> window_hi;
    SolverOptions solver;
    SweepOptions sweep;
};

ProblemConfig load_config(const std::string& path);
ProblemConfig parse_config(const std::string& text);

}  // namespace mgspec
