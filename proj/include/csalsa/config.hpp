#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "csalsa/harness.hpp"

namespace csalsa {

/// Everything needed to rebuild one run. Fields left unset take the
/// experiment's defaults.
///
/// Text form, one `key = value` per line, `#` starts a comment:
///
///   experiment = deblur-1          # required, see experiment_names()
///   name = my-run                  # output directory name
///   size = 128
///   lines = 22                     # mri, hdr
///   sigma = 0.56
///   mu = 0.5
///   epsilon = 12.5                 # overrides the epsilon rule
///   iterations = 500
///   seed = 1
///   regularizer = tv               # tv | l1-analysis | l1-synthesis
///   frame = undecimated            # undecimated | orthogonal
///   levels = 4
///   tv_iterations = 5
///   tv_step = 0.248
///   tv_warm_start = false
///   dynamic_range_db = 40          # hdr
///   squares = 15                   # hdr
///   missing_fraction = 0.4         # inpainting
///   snr_db = 40                    # inpainting
///   kernel_support = 9             # deblur
///   gaussian_variance = 1          # deblur-2a/2b
///   image = path/to/image.pgm      # deblur, inpainting
///   warm_start = false
///   feasibility_slack = 0.01
///   objective_rel_tol = 1e-4
///   stop_on_convergence = true
struct ExperimentConfig {
    std::string experiment;
    std::string name;
    std::size_t size = 128;
    std::size_t lines = 22;
    std::optional<double> sigma;
    std::optional<double> epsilon;
    /// Unset: the hand-tuned value for the experiment and formulation.
    std::optional<double> mu;
    int iterations = 500;
    std::uint64_t seed = 1;
    Formulation formulation = Formulation::TV;
    FrameFamily frame = FrameFamily::UndecimatedHaar;
    int levels = 4;
    TvSettings tv;
    double dynamic_range_db = 40.0;
    int squares = 15;
    double missing_fraction = 0.4;
    double snr_db = 40.0;
    int kernel_support = 9;
    double gaussian_variance = 1.0;
    std::string image;
    bool warm_start = false;
    double feasibility_slack = 0.01;
    double objective_rel_tol = 1e-4;
    bool stop_on_convergence = true;
};

const std::vector<std::string>& experiment_names();

/// Defaults for a named experiment. Throws ConfigError for unknown names.
ExperimentConfig default_experiment(const std::string& experiment);
/// Hand-tuned penalty for an experiment family and formulation.
double default_mu(const std::string& experiment, Formulation formulation);

/// Applies one key/value pair. Throws ConfigError naming the field (and
/// `line` when non-zero) on unknown keys or bad values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value, int line = 0);

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
std::string format_config(const ExperimentConfig& cfg);

struct PreparedExperiment {
    ProblemInstance instance;
    SolverChoice choice;
    SolverConfig solver;
};

/// Builds the problem instance and solver settings. Deterministic in cfg.
PreparedExperiment prepare_experiment(const ExperimentConfig& cfg);

}  // namespace csalsa
