#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "csalsa/frames.hpp"
#include "csalsa/operators.hpp"
#include "csalsa/prox.hpp"
#include "csalsa/types.hpp"

namespace csalsa {

/// Linear map H^(j) of one ADMM-2 block, given by its action and adjoint.
struct LinearMap {
    /// How the map guarantees injectivity, if at all. The stacked operator G
    /// needs full column rank, which holds structurally as soon as one block
    /// is the identity, a Parseval analysis operator or otherwise injective.
    enum class Structure { Identity, TightFrameAnalysis, Injective, General };

    std::string name;
    std::size_t input_size = 0;
    std::size_t output_size = 0;
    std::function<CVec(std::span<const cplx>)> apply;
    std::function<CVec(std::span<const cplx>)> adjoint;
    Structure structure = Structure::General;

    static LinearMap identity(std::size_t n);
    static LinearMap analysis(const Frame& frame);
    static LinearMap observation(const LinearOperator& op);
};

/// Proximity-capable function g_j.
struct ProxFunction {
    std::string name;
    /// Psi_{g/mu}(s)
    std::function<CVec(std::span<const cplx> s, double mu)> prox;
    /// g(v); used for instrumentation only, may be empty.
    std::function<double(std::span<const cplx> v)> evaluate;

    static ProxFunction regularizer(const Regularizer& reg, std::optional<Shape> shape);
    /// Indicator of the ball {v : ||v - center|| <= radius}. Its prox is the
    /// projection and does not depend on mu.
    static ProxFunction ball_indicator(BallConstraint ball);
    /// g = 0; prox is the identity.
    static ProxFunction zero();
};

struct SplitBlock {
    LinearMap map;
    ProxFunction g;
};

/// Quantities reported for one iterate: objective and constraint norm.
struct MonitorValues {
    double objective = 0.0;
    double constraint_norm = 0.0;
};

/// Problem  min_u sum_j g_j(H^(j) u)  prepared for ADMM-2.
struct SplitSpec {
    std::vector<SplitBlock> blocks;
    /// Applies [sum_j H^(j)^H H^(j)]^{-1}.
    std::function<CVec(std::span<const cplx>)> normal_inverse;
    /// Computes the reported objective and constraint norm from u and the
    /// block images H^(j) u. Optional.
    std::function<MonitorValues(std::span<const cplx> u, const std::vector<CVec>& Hu)> monitor;
    /// Maps u to the image estimate (identity, or W for synthesis). Optional.
    std::function<CVec(std::span<const cplx> u)> estimate;

    std::size_t domain_size() const;
    /// Throws DomainError when the blocks are inconsistent or no block makes
    /// the stacked operator injective.
    void validate() const;
};

struct SolverConfig {
    double mu = 1.0;
    double epsilon = 0.0;
    int max_iterations = 500;
    /// Feasibility means ||B u - y|| <= (1 + feasibility_slack) epsilon.
    double feasibility_slack = 0.01;
    /// Relative change of the objective over the stagnation window.
    double objective_rel_tol = 1e-4;
    int stagnation_window = 5;
    bool record_history = true;
    /// Stop as soon as check_stop reports convergence; otherwise run all
    /// max_iterations.
    bool stop_on_convergence = true;
    /// Start from u0 = A^H y (v0^(j) = H^(j) u0) instead of v0 = 0.
    bool warm_start_adjoint = false;
    /// Keep a copy of every iterate u_k (debug only, O(n) per iteration).
    bool debug_snapshots = false;
    /// Ground truth image; enables the per-iteration MSE column.
    std::optional<CVec> truth;

    void validate() const;
};

struct IterationRecord {
    int k = 0;
    double objective = 0.0;
    double constraint_norm = 0.0;
    double primal_residual = 0.0;
    double wall_time = 0.0;
    std::optional<double> mse;
};

struct SolverState {
    CVec u;
    std::vector<CVec> v;
    std::vector<CVec> d;
    int k = 0;
    double elapsed_seconds = 0.0;
    std::vector<IterationRecord> history;
    std::vector<CVec> snapshots;
};

/// Raised when an iterate becomes non-finite; carries the last finite state.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, SolverState last_state)
        : std::runtime_error(what), state_(std::move(last_state)) {}

    const SolverState& last_state() const { return state_; }

private:
    SolverState state_;
};

enum class StopDecision { Continue, Converged, Exhausted };

std::string to_string(StopDecision decision);

/// Zero-initialized state (v = d = 0) sized for `split`.
SolverState initial_state(const SplitSpec& split);
/// State with u0 given and v0^(j) = H^(j) u0, d0 = 0.
SolverState initial_state(const SplitSpec& split, std::span<const cplx> u0);

/// One ADMM-2 outer iteration:
///   zeta_j = v_j + d_j
///   u      = [sum H_j^H H_j]^{-1} sum H_j^H zeta_j
///   v_j    = Psi_{g_j/mu}(H_j u - d_j)
///   d_j    = d_j - H_j u + v_j
/// `state` is only modified when all new iterates are finite; otherwise a
/// DivergenceError holding the untouched state is thrown. Returns the
/// iteration record (also appended to the history when recording).
IterationRecord admm2_step(SolverState& state, const SplitSpec& split, const SolverConfig& config);

/// Feasibility-plus-stagnation rule over the most recent records:
/// converged iff the last constraint norm is <= (1 + slack) epsilon and the
/// objective changed by at most objective_rel_tol (relative) over the last
/// `stagnation_window` iterations; exhausted iff k >= max_iterations.
StopDecision check_stop(std::span<const IterationRecord> history, const SolverConfig& config);

struct SolveResult {
    /// Final u: an image, or frame coefficients in synthesis mode.
    CVec solution;
    /// Image estimate (W u in synthesis mode, else u).
    CVec image;
    std::vector<IterationRecord> history;
    IterationRecord last;
    StopDecision status = StopDecision::Continue;
    int iterations = 0;
    std::vector<CVec> snapshots;
};

/// Runs ADMM-2 on `split` until check_stop says so.
SolveResult run_admm2(const SplitSpec& split, const SolverConfig& config, SolverState state);

/// C-SALSA-1 split: H1 = I with g1 = phi, H2 = A with g2 the indicator of the
/// epsilon-ball around y. A = B, or B W when `op` is composed with a frame.
SplitSpec csalsa1_split(const LinearOperator& op, const Observation& y, const Regularizer& reg,
                        const SolverConfig& config);
/// C-SALSA-2 split: H1 = P (frame analysis) with g1 = phi on the
/// coefficients, H2 = B with the ball indicator. Uses P^H P = I, so the
/// u-update is (I + B^H B)^{-1} (P^H zeta_1 + B^H zeta_2).
SplitSpec csalsa2_split(const LinearOperator& op, const Frame& frame, const Observation& y, const Regularizer& reg,
                        const SolverConfig& config);

SolveResult csalsa1_solve(const LinearOperator& op, const Observation& y, const Regularizer& reg,
                          const SolverConfig& config);
SolveResult csalsa2_solve(const LinearOperator& op, const Frame& frame, const Observation& y, const Regularizer& reg,
                          const SolverConfig& config);

}  // namespace csalsa
