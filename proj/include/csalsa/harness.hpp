#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "csalsa/frames.hpp"
#include "csalsa/operators.hpp"
#include "csalsa/prox.hpp"
#include "csalsa/solver.hpp"
#include "csalsa/types.hpp"

namespace csalsa {

// ---- problem ingredients ----------------------------------------------------

/// sqrt(m + 8 sqrt(m)) sigma: radius that contains the noise vector with
/// high probability.
double epsilon_rule(std::size_t m, double sigma);

struct BlurKernelSpec {
    enum class Kind { Uniform, Gaussian, InverseQuadratic };
    Kind kind = Kind::Uniform;
    int support = 9;
    /// Gaussian only.
    double variance = 1.0;

    static BlurKernelSpec uniform(int support = 9) { return {Kind::Uniform, support, 1.0}; }
    static BlurKernelSpec gaussian(int support = 9, double variance = 1.0) { return {Kind::Gaussian, support, variance}; }
    static BlurKernelSpec inverse_quadratic(int support = 15) { return {Kind::InverseQuadratic, support, 1.0}; }
};

/// Centred, unit-sum kernel of odd support. InverseQuadratic entries are
/// proportional to 1 / (1 + i^2 + j^2) for integer offsets i, j.
ImageGrid make_blur_kernel(const BlurKernelSpec& spec);

struct Ellipse {
    double intensity;
    double semi_x;
    double semi_y;
    double x0;
    double y0;
    double angle_deg;
};

/// Ten-ellipse Shepp-Logan table with the contrast-enhanced intensities,
/// so the phantom takes values in [0, 1].
const std::vector<Ellipse>& shepp_logan_ellipses();
/// Rasterizes ellipses on an n x n grid covering [-1, 1]^2 (pixel centres,
/// row 0 at y = +1).
ImageGrid rasterize_ellipses(std::size_t n, const std::vector<Ellipse>& ellipses);
ImageGrid shepp_logan(std::size_t n);

/// Union of `lines` lines through DC at angles k pi / lines, rasterized by
/// nearest neighbour. Returned in DFT order (DC at index (0, 0)).
Mask radial_mask(std::size_t n, std::size_t lines);
/// Moves DC from (0, 0) to (n/2, n/2) for display.
Mask centered(const Mask& dft_ordered);

/// `count` axis-aligned squares (sides uniform in [4, n/4]) on a zero
/// background, amplitudes log-spaced between 1 and 10^(dynamic_range_db/20).
/// The weakest and strongest squares are painted last so both stay visible.
ImageGrid random_squares(std::size_t n, double dynamic_range_db, int count, std::uint64_t seed);

/// Piecewise-constant synthetic test image with values in [0, 255].
ImageGrid cartoon_image(std::size_t n);

/// Pixel mask with round(missing_fraction * n) pixels removed at random.
Mask random_pixel_mask(Shape shape, double missing_fraction, std::uint64_t seed);

// ---- metrics ----------------------------------------------------------------

double mse(const ImageGrid& estimate, const ImageGrid& truth);
double mse(std::span<const cplx> estimate, std::span<const cplx> truth);

struct IsnrValue {
    double db = 0.0;
    /// Estimate equals the truth; db is +infinity.
    bool saturated = false;
};

/// 10 log10(||y - x||^2 / ||x_hat - x||^2).
IsnrValue isnr(const ImageGrid& degraded, const ImageGrid& estimate, const ImageGrid& truth);

// ---- experiments ------------------------------------------------------------

struct ProblemInstance {
    std::string name;
    ImageGrid truth;
    LinearOperator op;
    Observation observation;
    double sigma = 0.0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    bool complex_noise = false;
};

/// y = B x + noise(sigma, seed); epsilon from epsilon_rule unless given.
ProblemInstance make_instance(std::string name, ImageGrid truth, LinearOperator op, double sigma, std::uint64_t seed,
                              bool complex_noise, std::optional<double> epsilon = std::nullopt);

enum class Formulation { TV, L1Analysis, L1Synthesis };

std::string to_string(Formulation f);
Formulation parse_formulation(const std::string& name);

struct SolverChoice {
    Formulation formulation = Formulation::TV;
    FrameFamily frame = FrameFamily::UndecimatedHaar;
    int levels = 4;
    TvSettings tv;
};

struct ExperimentReport {
    std::string name;
    SolverChoice choice;
    SolverConfig config;
    StopDecision status = StopDecision::Continue;
    int iterations = 0;
    OperatorCallCounter calls;
    double final_mse = 0.0;
    double final_constraint_norm = 0.0;
    double epsilon = 0.0;
    double wall_time = 0.0;
    std::vector<IterationRecord> history;
    /// Real part of the image estimate.
    ImageGrid estimate;
    /// Largest imaginary magnitude of the estimate (0 for real problems).
    double estimate_max_imag = 0.0;
};

/// Solves `instance` with the chosen formulation. The observation operator
/// is wrapped in a call counter; config.epsilon is taken from the instance
/// and config.truth from instance.truth.
ExperimentReport run_experiment(const ProblemInstance& instance, const SolverChoice& choice, SolverConfig config,
                                bool count_calls = true);

}  // namespace csalsa
