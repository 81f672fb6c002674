#pragma once

#include <span>
#include <string>

#include "csalsa/config.hpp"
#include "csalsa/harness.hpp"
#include "csalsa/solver.hpp"

namespace csalsa {

/// Files written for one run under <root>/<name>/.
struct RunOutputs {
    std::string directory;
    /// k, objective, constraint_norm, primal_residual, mse
    std::string history_csv;
    /// k, wall_time_s (kept apart so history_csv is reproducible bytewise)
    std::string timing_csv;
    std::string summary_json;
    /// 16-bit PGM of the real part of the estimate.
    std::string reconstruction_pgm;
    /// Resolved config in the key = value format; feeds back into --config.
    std::string config_txt;
};

RunOutputs output_paths(const std::string& root, const std::string& name);
/// True when any of the run's files already exists.
bool outputs_exist(const RunOutputs& out);

void write_history_csv(const std::string& path, std::span<const IterationRecord> history);
void write_timing_csv(const std::string& path, std::span<const IterationRecord> history);

/// Estimate mapped to 16 bits over [0, max(truth)] (clipped).
void write_reconstruction(const std::string& path, const ImageGrid& estimate, const ImageGrid& truth);

/// JSON summary: file paths, config echo, call counts and final metrics.
std::string summary_json(const ExperimentConfig& cfg, const ExperimentReport& report, const RunOutputs& out);
/// Summary for a run aborted by divergence.
std::string divergence_json(const ExperimentConfig& cfg, const PreparedExperiment& prepared, const DivergenceError& error,
                            const RunOutputs& out);

/// "name: <status> k=... mse=... ||Bu-y||=... eps=..."
std::string summary_line(const ExperimentReport& report);

}  // namespace csalsa
