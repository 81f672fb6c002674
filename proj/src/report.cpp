#include "csalsa/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "csalsa/image_io.hpp"
#include "json.hpp"

namespace csalsa {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_text(const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot write " + path);
    return out;
}

ordered_json config_json(const ExperimentConfig& cfg, const SolverConfig& solver)
{
    ordered_json c;
    c["experiment"] = cfg.experiment;
    c["name"] = cfg.name;
    c["size"] = cfg.size;
    c["lines"] = cfg.lines;
    c["sigma"] = cfg.sigma ? ordered_json(*cfg.sigma) : ordered_json(nullptr);
    c["epsilon_override"] = cfg.epsilon ? ordered_json(*cfg.epsilon) : ordered_json(nullptr);
    c["mu"] = solver.mu;
    c["iterations"] = cfg.iterations;
    c["seed"] = cfg.seed;
    c["regularizer"] = to_string(cfg.formulation);
    c["frame"] = to_string(cfg.frame);
    c["levels"] = cfg.levels;
    c["tv_iterations"] = cfg.tv.inner_iterations;
    c["tv_step"] = cfg.tv.dual_step;
    c["tv_warm_start"] = cfg.tv.warm_start;
    c["dynamic_range_db"] = cfg.dynamic_range_db;
    c["squares"] = cfg.squares;
    c["missing_fraction"] = cfg.missing_fraction;
    c["snr_db"] = cfg.snr_db;
    c["kernel_support"] = cfg.kernel_support;
    c["gaussian_variance"] = cfg.gaussian_variance;
    c["image"] = cfg.image;
    c["warm_start"] = cfg.warm_start;
    c["feasibility_slack"] = solver.feasibility_slack;
    c["objective_rel_tol"] = solver.objective_rel_tol;
    c["stagnation_window"] = solver.stagnation_window;
    c["stop_on_convergence"] = solver.stop_on_convergence;
    return c;
}

ordered_json files_json(const RunOutputs& out)
{
    ordered_json f;
    f["history_csv"] = out.history_csv;
    f["timing_csv"] = out.timing_csv;
    f["summary_json"] = out.summary_json;
    f["reconstruction_pgm"] = out.reconstruction_pgm;
    f["config_txt"] = out.config_txt;
    return f;
}

}  // namespace

RunOutputs output_paths(const std::string& root, const std::string& name)
{
    const fs::path dir = fs::path(root) / name;
    return RunOutputs{dir.string(), (dir / "history.csv").string(), (dir / "timing.csv").string(),
                      (dir / "summary.json").string(), (dir / "reconstruction.pgm").string(), (dir / "config.txt").string()};
}

bool outputs_exist(const RunOutputs& out)
{
    for (const std::string* p : {&out.history_csv, &out.timing_csv, &out.summary_json, &out.reconstruction_pgm, &out.config_txt}) {
        if (fs::exists(*p)) return true;
    }
    return false;
}

void write_history_csv(const std::string& path, std::span<const IterationRecord> history)
{
    std::ofstream out = open_text(path);
    out << "k,objective,constraint_norm,primal_residual,mse\n";
    for (const IterationRecord& r : history) {
        out << r.k << ',' << num(r.objective) << ',' << num(r.constraint_norm) << ',' << num(r.primal_residual) << ','
            << (r.mse ? num(*r.mse) : std::string{}) << '\n';
    }
    if (!out) throw DomainError("write failed for " + path);
}

void write_timing_csv(const std::string& path, std::span<const IterationRecord> history)
{
    std::ofstream out = open_text(path);
    out << "k,wall_time_s\n";
    for (const IterationRecord& r : history) out << r.k << ',' << num(r.wall_time) << '\n';
    if (!out) throw DomainError("write failed for " + path);
}

void write_reconstruction(const std::string& path, const ImageGrid& estimate, const ImageGrid& truth)
{
    const double hi = *std::max_element(truth.values().begin(), truth.values().end());
    write_pgm(path, quantize(estimate, 0.0, hi > 0.0 ? hi : 1.0, 65535));
}

std::string summary_json(const ExperimentConfig& cfg, const ExperimentReport& report, const RunOutputs& out)
{
    ordered_json j;
    j["name"] = report.name;
    j["status"] = to_string(report.status);
    j["files"] = files_json(out);
    j["config"] = config_json(cfg, report.config);
    j["iterations"] = report.iterations;
    j["calls"] = {{"forward", report.calls.forward},
                  {"adjoint", report.calls.adjoint},
                  {"forward_plus_adjoint", report.calls.operator_calls()},
                  {"inverse", report.calls.inverse}};
    j["epsilon"] = report.epsilon;
    j["final_mse"] = report.final_mse;
    j["final_constraint_norm"] = report.final_constraint_norm;
    j["final_objective"] = report.history.empty() ? 0.0 : report.history.back().objective;
    j["final_primal_residual"] = report.history.empty() ? 0.0 : report.history.back().primal_residual;
    j["estimate_max_imag"] = report.estimate_max_imag;
    j["wall_time_s"] = report.wall_time;
    return j.dump(2) + "\n";
}

std::string divergence_json(const ExperimentConfig& cfg, const PreparedExperiment& prepared, const DivergenceError& error,
                            const RunOutputs& out)
{
    ordered_json j;
    j["name"] = cfg.name;
    j["status"] = "diverged";
    j["error"] = error.what();
    ordered_json files = files_json(out);
    files.erase("reconstruction_pgm");
    j["files"] = files;
    j["config"] = config_json(cfg, prepared.solver);
    j["iterations"] = error.last_state().k;
    j["epsilon"] = prepared.instance.epsilon;
    return j.dump(2) + "\n";
}

std::string summary_line(const ExperimentReport& report)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s: %s iterations=%d mse=%.6g constraint=%.6g epsilon=%.6g", report.name.c_str(),
                  to_string(report.status).c_str(), report.iterations, report.final_mse, report.final_constraint_norm,
                  report.epsilon);
    return buf;
}

}  // namespace csalsa
