#include "csalsa/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <thread>

#include "CLI11.hpp"
#include "csalsa/config.hpp"
#include "csalsa/errors.hpp"
#include "csalsa/fft.hpp"
#include "csalsa/report.hpp"
#include "csalsa/validate.hpp"

namespace csalsa::cli {
namespace {

namespace fs = std::filesystem;

struct RunOptions {
    std::vector<std::string> experiments;
    std::vector<std::string> configs;
    std::vector<std::string> settings;
    std::optional<double> mu;
    std::optional<double> epsilon;
    std::optional<int> iterations;
    std::optional<long long> seed;
    std::optional<int> size;
    std::optional<int> lines;
    std::string name;
    int jobs = 1;
    std::string out;
    bool overwrite = false;
    bool quiet = false;
};

std::string format_number(double v)
{
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

// Flags win over config files.
void apply_overrides(ExperimentConfig& cfg, const RunOptions& opt)
{
    for (const std::string& kv : opt.settings) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'", 0, kv);
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t") + 1);
            return s;
        };
        const std::string key = trim(kv.substr(0, eq));
        if (key == "experiment") throw ConfigError("use --experiment to choose the experiment", 0, key);
        apply_setting(cfg, key, trim(kv.substr(eq + 1)));
    }
    if (opt.size) apply_setting(cfg, "size", std::to_string(*opt.size));
    if (opt.lines) apply_setting(cfg, "lines", std::to_string(*opt.lines));
    if (opt.mu) apply_setting(cfg, "mu", format_number(*opt.mu));
    if (opt.epsilon) apply_setting(cfg, "epsilon", format_number(*opt.epsilon));
    if (opt.iterations) apply_setting(cfg, "iterations", std::to_string(*opt.iterations));
    if (opt.seed) apply_setting(cfg, "seed", std::to_string(*opt.seed));
    if (!opt.name.empty()) apply_setting(cfg, "name", opt.name);
}

struct Job {
    ExperimentConfig cfg;
    PreparedExperiment prepared;
    RunOutputs outputs;
};

struct JobResult {
    int code = Converged;
    std::string line;
};

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << text;
    if (!f) throw DomainError("cannot write " + path);
}

JobResult execute(const Job& job)
{
    const RunOutputs& out = job.outputs;
    try {
        const ExperimentReport report =
            run_experiment(job.prepared.instance, job.prepared.choice, job.prepared.solver);
        write_history_csv(out.history_csv, report.history);
        write_timing_csv(out.timing_csv, report.history);
        write_reconstruction(out.reconstruction_pgm, report.estimate, job.prepared.instance.truth);
        write_text(out.config_txt, format_config(job.cfg));
        write_text(out.summary_json, summary_json(job.cfg, report, out));
        return {report.status == StopDecision::Converged ? Converged : Exhausted, summary_line(report)};
    } catch (const DivergenceError& e) {
        // Keep what was computed up to the last finite iterate.
        write_history_csv(out.history_csv, e.last_state().history);
        write_timing_csv(out.timing_csv, e.last_state().history);
        write_text(out.config_txt, format_config(job.cfg));
        write_text(out.summary_json, divergence_json(job.cfg, job.prepared, e, out));
        return {Diverged, job.cfg.name + ": diverged iterations=" + std::to_string(e.last_state().k) + " (" +
                              e.what() + ")"};
    }
}

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err)
{
    if (opt.experiments.empty() && opt.configs.empty()) {
        err << "run: give at least one --experiment or --config\n";
        return Usage;
    }
    if (opt.jobs < 1) {
        err << "run: --jobs must be >= 1\n";
        return Usage;
    }

    std::vector<ExperimentConfig> configs;
    try {
        for (const std::string& path : opt.configs) configs.push_back(load_config(path));
        for (const std::string& e : opt.experiments) configs.push_back(default_experiment(e));
        for (ExperimentConfig& cfg : configs) apply_overrides(cfg, opt);
    } catch (const ConfigError& e) {
        err << "usage error: " << e.what();
        if (!e.field().empty()) err << " [field: " << e.field() << "]";
        err << '\n';
        return Usage;
    }

    std::set<std::string> names;
    for (const ExperimentConfig& cfg : configs) {
        if (!names.insert(cfg.name).second) {
            err << "usage error: two runs share the output name '" << cfg.name << "'; set name per config\n";
            return Usage;
        }
    }

    std::string root = opt.out;
    if (root.empty()) {
        const char* env = std::getenv(output_root_env);
        root = env && *env ? env : "runs";
    }

    std::vector<Job> jobs;
    for (ExperimentConfig& cfg : configs) {
        RunOutputs paths = output_paths(root, cfg.name);
        if (outputs_exist(paths) && !opt.overwrite) {
            err << "refusing to overwrite existing outputs in " << paths.directory << " (pass --overwrite)\n";
            return Usage;
        }
        try {
            PreparedExperiment prepared = prepare_experiment(cfg);
            jobs.push_back(Job{std::move(cfg), std::move(prepared), std::move(paths)});
        } catch (const ConfigError& e) {
            err << "usage error: " << cfg.name << ": " << e.what() << '\n';
            return Usage;
        } catch (const DomainError& e) {
            err << "usage error: " << cfg.name << ": " << e.what() << '\n';
            return Usage;
        }
    }
    for (const Job& job : jobs) fs::create_directories(job.outputs.directory);

    std::vector<JobResult> results(jobs.size());
    std::atomic<std::size_t> next{0};
    std::mutex print;
    auto worker = [&]() {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                results[i] = execute(jobs[i]);
            } catch (const std::exception& e) {
                results[i] = {Diverged, jobs[i].cfg.name + ": failed (" + e.what() + ")"};
            }
            if (!opt.quiet) {
                std::lock_guard lock(print);
                out << results[i].line << '\n' << std::flush;
            }
        }
    };
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(opt.jobs), jobs.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    int code = Converged;
    for (const JobResult& r : results) {
        if (r.code == Diverged) code = Diverged;
        else if (r.code == Exhausted && code != Diverged) code = Exhausted;
    }
    return code;
}

int cmd_validate(const std::string& fault, std::ostream& out, std::ostream& err)
{
    if (fault == "dft-normalization") {
        fft::testing::set_normalization_fault(1.1);
    } else if (!fault.empty()) {
        err << "unknown fault '" << fault << "'\n";
        return Usage;
    }
    const auto start = std::chrono::steady_clock::now();
    const std::vector<PropertyResult> results = run_property_suite();
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fft::testing::set_normalization_fault(1.0);

    std::size_t failed = 0;
    for (const PropertyResult& r : results) {
        failed += r.passed ? 0 : 1;
        char time[32];
        std::snprintf(time, sizeof time, "%.3fs", r.seconds);
        out << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.detail << "  (" << time << ")\n";
    }
    char summary[96];
    std::snprintf(summary, sizeof summary, "%zu/%zu properties passed in %.2f s", results.size() - failed,
                  results.size(), total);
    out << summary << '\n';
    if (total > 60.0) err << "warning: property suite took longer than 60 s\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"C-SALSA constrained reconstruction benchmarks", "csalsa"};
    app.require_subcommand(0, 1);

    bool validate_flag = false;
    std::string fault;
    app.add_flag("--validate", validate_flag, "Run the property suite and exit");
    app.add_option("--inject-fault", fault)->group("");

    RunOptions opt;
    CLI::App* run = app.add_subcommand("run", "Run one or more experiments");
    run->add_option("-e,--experiment", opt.experiments, "Experiment name (repeatable)")
        ->check(CLI::IsMember(experiment_names()));
    run->add_option("-c,--config", opt.configs, "Config file in key = value form (repeatable)");
    run->add_option("--set", opt.settings, "Extra key=value setting applied to every run (repeatable)");
    run->add_option("--mu", opt.mu, "Penalty parameter");
    run->add_option("--epsilon", opt.epsilon, "Ball radius (overrides the noise rule)");
    run->add_option("--iterations", opt.iterations, "Maximum outer iterations");
    run->add_option("--seed", opt.seed, "Seed for image, mask and noise");
    run->add_option("--size", opt.size, "Image side length");
    run->add_option("--lines", opt.lines, "Radial lines (mri, hdr)");
    run->add_option("--name", opt.name, "Output directory name (single run)");
    run->add_option("-j,--jobs", opt.jobs, "Parallel runs")->capture_default_str();
    run->add_option("-o,--out", opt.out, std::string("Output root (default $") + output_root_env + " or ./runs)");
    run->add_flag("--overwrite", opt.overwrite, "Replace existing run outputs");
    run->add_flag("-q,--quiet", opt.quiet, "No per-run summary lines");

    CLI::App* validate = app.add_subcommand("validate", "Run the property suite");
    validate->add_option("--inject-fault", fault)->group("");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return Usage;
    }

    if (validate_flag || validate->parsed()) return cmd_validate(fault, out, err);
    if (run->parsed()) {
        if (!opt.name.empty() && opt.experiments.size() + opt.configs.size() > 1) {
            err << "usage error: --name applies to a single run\n";
            return Usage;
        }
        return cmd_run(opt, out, err);
    }
    err << app.help();
    return Usage;
}

}  // namespace csalsa::cli
