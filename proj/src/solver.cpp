#include "csalsa/solver.hpp"

#include <algorithm>
#include <chrono>
#include <memory>

namespace csalsa {

// ---- building blocks --------------------------------------------------------

LinearMap LinearMap::identity(std::size_t n)
{
    auto copy = [](std::span<const cplx> x) { return CVec(x.begin(), x.end()); };
    return LinearMap{"identity", n, n, copy, copy, Structure::Identity};
}

LinearMap LinearMap::analysis(const Frame& frame)
{
    return LinearMap{"frame-analysis",
                     frame.image_size(),
                     frame.coefficient_size(),
                     [frame](std::span<const cplx> x) { return frame.analysis(x); },
                     [frame](std::span<const cplx> c) { return frame.synthesis(c); },
                     Structure::TightFrameAnalysis};
}

LinearMap LinearMap::observation(const LinearOperator& op)
{
    return LinearMap{"observation-" + to_string(op.kind()),
                     op.domain_size(),
                     op.range_size(),
                     [op](std::span<const cplx> x) { return op.forward(x); },
                     [op](std::span<const cplx> r) { return op.adjoint(r); },
                     Structure::General};
}

ProxFunction ProxFunction::regularizer(const Regularizer& reg, std::optional<Shape> shape)
{
    if (reg.kind() == Regularizer::Kind::IsotropicTV && !shape) {
        throw CapabilityError("TV regularization needs an image-domain variable");
    }
    auto dual = std::make_shared<TvDualField>();
    return ProxFunction{reg.name(),
                        [reg, shape, dual](std::span<const cplx> s, double mu) {
                            return reg.prox(s, 1.0 / mu, shape, dual.get());
                        },
                        [reg, shape](std::span<const cplx> v) { return reg.evaluate(v, shape); }};
}

ProxFunction ProxFunction::ball_indicator(BallConstraint ball)
{
    auto shared = std::make_shared<const BallConstraint>(std::move(ball));
    return ProxFunction{"ball-indicator",
                        [shared](std::span<const cplx> s, double) { return project_ball(s, *shared); },
                        [](std::span<const cplx>) { return 0.0; }};
}

ProxFunction ProxFunction::zero()
{
    return ProxFunction{"zero",
                        [](std::span<const cplx> s, double) { return CVec(s.begin(), s.end()); },
                        [](std::span<const cplx>) { return 0.0; }};
}

std::size_t SplitSpec::domain_size() const
{
    return blocks.empty() ? 0 : blocks.front().map.input_size;
}

void SplitSpec::validate() const
{
    if (blocks.empty()) throw DomainError("split needs at least one block");
    if (!normal_inverse) throw DomainError("split needs a normal-equation inverse");
    const std::size_t n = domain_size();
    bool injective = false;
    for (const SplitBlock& b : blocks) {
        if (b.map.input_size != n) throw DomainError("split blocks disagree on the domain size");
        if (!b.map.apply || !b.map.adjoint || !b.g.prox) throw DomainError("split block is incomplete");
        injective = injective || b.map.structure != LinearMap::Structure::General;
    }
    if (!injective) {
        throw DomainError("stacked operator G is not structurally full column rank: no identity, "
                          "tight-frame analysis or injective block");
    }
}

void SolverConfig::validate() const
{
    if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("mu must be positive");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be >= 0");
    if (max_iterations < 1) throw DomainError("max_iterations must be >= 1");
    if (!(feasibility_slack >= 0.0)) throw DomainError("feasibility_slack must be >= 0");
    if (!(objective_rel_tol >= 0.0)) throw DomainError("objective_rel_tol must be >= 0");
    if (stagnation_window < 1) throw DomainError("stagnation_window must be >= 1");
}

std::string to_string(StopDecision decision)
{
    switch (decision) {
    case StopDecision::Continue: return "continue";
    case StopDecision::Converged: return "converged";
    case StopDecision::Exhausted: return "exhausted";
    }
    return "unknown";
}

// ---- ADMM-2 -----------------------------------------------------------------

SolverState initial_state(const SplitSpec& split)
{
    split.validate();
    SolverState s;
    s.u.assign(split.domain_size(), cplx{});
    for (const SplitBlock& b : split.blocks) {
        s.v.emplace_back(b.map.output_size, cplx{});
        s.d.emplace_back(b.map.output_size, cplx{});
    }
    return s;
}

SolverState initial_state(const SplitSpec& split, std::span<const cplx> u0)
{
    SolverState s = initial_state(split);
    if (u0.size() != s.u.size()) throw DomainError("initial u has the wrong length");
    s.u.assign(u0.begin(), u0.end());
    for (std::size_t j = 0; j < split.blocks.size(); ++j) s.v[j] = split.blocks[j].map.apply(u0);
    return s;
}

namespace {

bool finite_all(const std::vector<CVec>& vs)
{
    return std::all_of(vs.begin(), vs.end(), [](const CVec& v) { return all_finite(v); });
}

}  // namespace

IterationRecord admm2_step(SolverState& state, const SplitSpec& split, const SolverConfig& config)
{
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t J = split.blocks.size();
    if (state.v.size() != J || state.d.size() != J || state.u.size() != split.domain_size()) {
        throw DomainError("solver state does not match split");
    }

    // r = sum_j H_j^H (v_j + d_j)
    CVec r(split.domain_size(), cplx{});
    for (std::size_t j = 0; j < J; ++j) {
        const CVec zeta = add(state.v[j], state.d[j]);
        const CVec back = split.blocks[j].map.adjoint(zeta);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += back[i];
    }
    CVec u = split.normal_inverse(r);

    std::vector<CVec> Hu(J), v(J), d(J);
    double residual2 = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
        Hu[j] = split.blocks[j].map.apply(u);
        v[j] = split.blocks[j].g.prox(subtract(Hu[j], state.d[j]), config.mu);
        d[j].resize(Hu[j].size());
        for (std::size_t i = 0; i < Hu[j].size(); ++i) {
            d[j][i] = state.d[j][i] - Hu[j][i] + v[j][i];
            residual2 += std::norm(Hu[j][i] - v[j][i]);
        }
    }

    if (!all_finite(u) || !finite_all(v) || !finite_all(d)) {
        throw DivergenceError("non-finite iterate at iteration " + std::to_string(state.k + 1), state);
    }

    IterationRecord rec;
    rec.k = state.k + 1;
    rec.primal_residual = std::sqrt(residual2);
    if (split.monitor) {
        const MonitorValues m = split.monitor(u, Hu);
        rec.objective = m.objective;
        rec.constraint_norm = m.constraint_norm;
    }
    if (config.truth) {
        const CVec image = split.estimate ? split.estimate(u) : u;
        if (image.size() != config.truth->size()) throw DomainError("truth image has the wrong size");
        rec.mse = squared_norm(subtract(image, *config.truth)) / static_cast<double>(image.size());
    }

    state.u = std::move(u);
    state.v = std::move(v);
    state.d = std::move(d);
    state.k = rec.k;
    if (config.debug_snapshots) state.snapshots.push_back(state.u);

    state.elapsed_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rec.wall_time = state.elapsed_seconds;
    if (config.record_history) state.history.push_back(rec);
    return rec;
}

StopDecision check_stop(std::span<const IterationRecord> history, const SolverConfig& config)
{
    if (history.empty()) throw DomainError("check_stop needs at least one record");
    const IterationRecord& last = history.back();
    // Small absolute floor so that epsilon = 0 problems can terminate.
    constexpr double kFeasibilityFloor = 1e-9;
    const bool feasible = last.constraint_norm <= (1.0 + config.feasibility_slack) * config.epsilon + kFeasibilityFloor;

    bool stagnant = false;
    const auto window = static_cast<std::size_t>(config.stagnation_window);
    if (history.size() > window) {
        const double now = last.objective;
        const double then = history[history.size() - 1 - window].objective;
        const double scale = std::max({std::abs(now), std::abs(then), 1e-300});
        stagnant = std::abs(now - then) <= config.objective_rel_tol * scale;
    }
    if (feasible && stagnant) return StopDecision::Converged;
    if (last.k >= config.max_iterations) return StopDecision::Exhausted;
    return StopDecision::Continue;
}

SolveResult run_admm2(const SplitSpec& split, const SolverConfig& config, SolverState state)
{
    config.validate();
    split.validate();
    const std::size_t keep = static_cast<std::size_t>(config.stagnation_window) + 1;
    std::vector<IterationRecord> recent;
    SolveResult result;
    for (;;) {
        const IterationRecord rec = admm2_step(state, split, config);
        recent.push_back(rec);
        if (recent.size() > keep) recent.erase(recent.begin());
        const StopDecision decision = check_stop(recent, config);
        result.last = rec;
        result.status = decision;
        if (decision == StopDecision::Exhausted) break;
        if (decision == StopDecision::Converged && (config.stop_on_convergence || rec.k >= config.max_iterations)) break;
    }
    result.iterations = state.k;
    result.image = split.estimate ? split.estimate(state.u) : state.u;
    result.solution = std::move(state.u);
    result.history = std::move(state.history);
    result.snapshots = std::move(state.snapshots);
    return result;
}

// ---- C-SALSA ----------------------------------------------------------------

SplitSpec csalsa1_split(const LinearOperator& op, const Observation& y, const Regularizer& reg,
                        const SolverConfig& config)
{
    config.validate();
    if (y.size() != op.range_size()) throw DomainError("observation length does not match operator range");
    const std::optional<Shape> shape =
        op.is_synthesis() || op.kind() == OperatorKind::Custom ? std::nullopt : std::optional<Shape>(op.image_shape());

    SplitSpec split;
    split.blocks.push_back({LinearMap::identity(op.domain_size()), ProxFunction::regularizer(reg, shape)});
    split.blocks.push_back({LinearMap::observation(op), ProxFunction::ball_indicator({y, config.epsilon})});
    split.normal_inverse = [op](std::span<const cplx> r) { return op.shifted_normal_inverse(r); };
    split.monitor = [reg, shape, y](std::span<const cplx> u, const std::vector<CVec>& Hu) {
        return MonitorValues{reg.evaluate(u, shape), norm2(subtract(Hu[1], y))};
    };
    if (op.is_synthesis()) {
        const Frame frame = *op.frame();
        split.estimate = [frame](std::span<const cplx> u) { return frame.synthesis(u); };
    }
    return split;
}

SplitSpec csalsa2_split(const LinearOperator& op, const Frame& frame, const Observation& y, const Regularizer& reg,
                        const SolverConfig& config)
{
    config.validate();
    if (op.is_synthesis()) throw DomainError("C-SALSA-2 expects an image-domain operator B, not B W");
    if (y.size() != op.range_size()) throw DomainError("observation length does not match operator range");
    if (frame.image_size() != op.domain_size()) throw DomainError("frame does not match operator domain");

    SplitSpec split;
    split.blocks.push_back({LinearMap::analysis(frame), ProxFunction::regularizer(reg, std::nullopt)});
    split.blocks.push_back({LinearMap::observation(op), ProxFunction::ball_indicator({y, config.epsilon})});
    // P^H P = I for a Parseval frame.
    split.normal_inverse = [op](std::span<const cplx> r) { return op.shifted_normal_inverse(r); };
    split.monitor = [reg, y](std::span<const cplx>, const std::vector<CVec>& Hu) {
        return MonitorValues{reg.evaluate(Hu[0]), norm2(subtract(Hu[1], y))};
    };
    return split;
}

namespace {

SolverState start_state(const SplitSpec& split, const LinearOperator& op, const Observation& y,
                        const SolverConfig& config)
{
    if (!config.warm_start_adjoint) return initial_state(split);
    // A^H y lives in u's domain for both C-SALSA variants.
    return initial_state(split, op.adjoint(y));
}

}  // namespace

SolveResult csalsa1_solve(const LinearOperator& op, const Observation& y, const Regularizer& reg,
                          const SolverConfig& config)
{
    const SplitSpec split = csalsa1_split(op, y, reg, config);
    return run_admm2(split, config, start_state(split, op, y, config));
}

SolveResult csalsa2_solve(const LinearOperator& op, const Frame& frame, const Observation& y, const Regularizer& reg,
                          const SolverConfig& config)
{
    const SplitSpec split = csalsa2_split(op, frame, y, reg, config);
    return run_admm2(split, config, start_state(split, op, y, config));
}

}  // namespace csalsa
