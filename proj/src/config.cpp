#include "csalsa/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "csalsa/image_io.hpp"

namespace csalsa {
namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Independent stream per purpose so the image and the noise never share draws.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    return splitmix64(seed ^ splitmix64(stream));
}

bool is_deblur(const std::string& name)
{
    return name.rfind("deblur-", 0) == 0;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v, int line)
{
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
        throw ConfigError("'" + v + "' is not a number for " + key, line, key);
    }
    return out;
}

long long parse_int(const std::string& key, const std::string& v, int line)
{
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError("'" + v + "' is not an integer for " + key, line, key);
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& v, int line)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("'" + v + "' is not a boolean for " + key, line, key);
}

void require(bool ok, const std::string& what, const std::string& key, int line)
{
    if (!ok) throw ConfigError(key + " " + what, line, key);
}

}  // namespace

const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names = {"deblur-1", "deblur-2a", "deblur-2b", "deblur-3a",
                                                    "deblur-3b", "mri",       "hdr",       "inpainting"};
    return names;
}

double default_mu(const std::string& experiment, Formulation formulation)
{
    if (experiment == "mri") return 200.0;
    if (experiment == "hdr") return 3.0;
    if (experiment == "inpainting") return 0.1;
    // Hand-tuned on the 128 x 128 cartoon image with the adjoint warm start.
    static const std::map<std::string, std::array<double, 3>> deblur = {
        // tv, l1-analysis, l1-synthesis
        {"deblur-1", {0.5, 3.0, 10.0}},
        {"deblur-2a", {1.0, 3.0, 10.0}},
        {"deblur-2b", {0.3, 2.0, 10.0}},
        {"deblur-3a", {1.3, 1.0, 10.0}},
        {"deblur-3b", {1.2, 1.0, 10.0}},
    };
    const auto it = deblur.find(experiment);
    if (it == deblur.end()) throw ConfigError("unknown experiment '" + experiment + "'", 0, "experiment");
    return it->second[static_cast<std::size_t>(formulation)];
}

ExperimentConfig default_experiment(const std::string& experiment)
{
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), experiment) == names.end()) {
        throw ConfigError("unknown experiment '" + experiment + "'", 0, "experiment");
    }
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    cfg.name = experiment;
    if (is_deblur(experiment)) {
        cfg.iterations = 1000;
        cfg.tv.inner_iterations = 5;
        cfg.warm_start = true;
        cfg.kernel_support = experiment[7] == '3' ? 15 : 9;
    } else if (experiment == "mri") {
        cfg.lines = 22;
        cfg.iterations = 300;
        cfg.tv.inner_iterations = 10;
        cfg.tv.warm_start = true;
    } else if (experiment == "hdr") {
        cfg.lines = 27;
        cfg.iterations = 150;
        cfg.tv.inner_iterations = 10;
        cfg.tv.warm_start = true;
    } else {
        cfg.iterations = 200;
        cfg.tv.inner_iterations = 10;
        cfg.tv.warm_start = true;
    }
    return cfg;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value, int line)
{
    const std::string& v = value;
    if (key == "experiment") {
        const std::string keep = cfg.name == cfg.experiment ? std::string{} : cfg.name;
        try {
            cfg = default_experiment(v);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(e.what()), line, key);
        }
        if (!keep.empty()) cfg.name = keep;
    } else if (key == "name") {
        require(!v.empty() && v.find('/') == std::string::npos && v != "." && v != "..", "must be a plain directory name",
                key, line);
        cfg.name = v;
    } else if (key == "size") {
        const auto n = parse_int(key, v, line);
        require(n >= 16 && n <= 4096, "must be in [16, 4096]", key, line);
        cfg.size = static_cast<std::size_t>(n);
    } else if (key == "lines") {
        const auto n = parse_int(key, v, line);
        require(n >= 1, "must be >= 1", key, line);
        cfg.lines = static_cast<std::size_t>(n);
    } else if (key == "sigma") {
        const double s = parse_double(key, v, line);
        require(s >= 0.0, "must be >= 0", key, line);
        cfg.sigma = s;
    } else if (key == "epsilon") {
        const double e = parse_double(key, v, line);
        require(e >= 0.0, "must be >= 0", key, line);
        cfg.epsilon = e;
    } else if (key == "mu") {
        const double m = parse_double(key, v, line);
        require(m > 0.0, "must be > 0", key, line);
        cfg.mu = m;
    } else if (key == "iterations") {
        const auto n = parse_int(key, v, line);
        require(n >= 1 && n <= 1000000, "must be in [1, 1000000]", key, line);
        cfg.iterations = static_cast<int>(n);
    } else if (key == "seed") {
        const auto n = parse_int(key, v, line);
        require(n >= 0, "must be >= 0", key, line);
        cfg.seed = static_cast<std::uint64_t>(n);
    } else if (key == "regularizer" || key == "formulation") {
        try {
            cfg.formulation = parse_formulation(v);
        } catch (const DomainError& e) {
            throw ConfigError(e.what(), line, key);
        }
    } else if (key == "frame") {
        try {
            cfg.frame = parse_frame_family(v);
        } catch (const DomainError& e) {
            throw ConfigError(e.what(), line, key);
        }
    } else if (key == "levels") {
        const auto n = parse_int(key, v, line);
        require(n >= 1 && n <= 12, "must be in [1, 12]", key, line);
        cfg.levels = static_cast<int>(n);
    } else if (key == "tv_iterations") {
        const auto n = parse_int(key, v, line);
        require(n >= 0 && n <= 100000, "must be in [0, 100000]", key, line);
        cfg.tv.inner_iterations = static_cast<int>(n);
    } else if (key == "tv_step") {
        const double s = parse_double(key, v, line);
        require(s > 0.0, "must be > 0", key, line);
        cfg.tv.dual_step = s;
    } else if (key == "tv_warm_start") {
        cfg.tv.warm_start = parse_bool(key, v, line);
    } else if (key == "dynamic_range_db") {
        const double d = parse_double(key, v, line);
        require(d >= 0.0, "must be >= 0", key, line);
        cfg.dynamic_range_db = d;
    } else if (key == "squares") {
        const auto n = parse_int(key, v, line);
        require(n >= 1, "must be >= 1", key, line);
        cfg.squares = static_cast<int>(n);
    } else if (key == "missing_fraction") {
        const double f = parse_double(key, v, line);
        require(f >= 0.0 && f < 1.0, "must be in [0, 1)", key, line);
        cfg.missing_fraction = f;
    } else if (key == "snr_db") {
        cfg.snr_db = parse_double(key, v, line);
    } else if (key == "kernel_support") {
        const auto n = parse_int(key, v, line);
        require(n >= 1 && n % 2 == 1, "must be odd and positive", key, line);
        cfg.kernel_support = static_cast<int>(n);
    } else if (key == "gaussian_variance") {
        const double g = parse_double(key, v, line);
        require(g > 0.0, "must be > 0", key, line);
        cfg.gaussian_variance = g;
    } else if (key == "image") {
        cfg.image = v;
    } else if (key == "warm_start") {
        cfg.warm_start = parse_bool(key, v, line);
    } else if (key == "feasibility_slack") {
        const double s = parse_double(key, v, line);
        require(s >= 0.0, "must be >= 0", key, line);
        cfg.feasibility_slack = s;
    } else if (key == "objective_rel_tol") {
        const double t = parse_double(key, v, line);
        require(t >= 0.0, "must be >= 0", key, line);
        cfg.objective_rel_tol = t;
    } else if (key == "stop_on_convergence") {
        cfg.stop_on_convergence = parse_bool(key, v, line);
    } else {
        throw ConfigError("unknown key '" + key + "'", line, key);
    }
}

ExperimentConfig parse_config(std::istream& in)
{
    struct Entry {
        std::string key, value;
        int line;
    };
    std::vector<Entry> entries;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", line);
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key before '='", line);
        if (value.empty()) throw ConfigError("missing value for " + key, line, key);
        for (const Entry& e : entries) {
            if (e.key == key) throw ConfigError("duplicate key '" + key + "' (first on line " + std::to_string(e.line) + ")", line, key);
        }
        entries.push_back({key, value, line});
    }

    auto exp = std::find_if(entries.begin(), entries.end(), [](const Entry& e) { return e.key == "experiment"; });
    if (exp == entries.end()) throw ConfigError("missing required key 'experiment'", 0, "experiment");
    ExperimentConfig cfg;
    apply_setting(cfg, exp->key, exp->value, exp->line);
    for (const Entry& e : entries) {
        if (e.key != "experiment") apply_setting(cfg, e.key, e.value, e.line);
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return parse_config(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what(), 0, e.field());
    }
}

std::string format_config(const ExperimentConfig& cfg)
{
    std::ostringstream out;
    out.precision(17);
    out << "experiment = " << cfg.experiment << '\n'
        << "name = " << cfg.name << '\n'
        << "size = " << cfg.size << '\n'
        << "lines = " << cfg.lines << '\n';
    if (cfg.sigma) out << "sigma = " << *cfg.sigma << '\n';
    if (cfg.epsilon) out << "epsilon = " << *cfg.epsilon << '\n';
    if (cfg.mu) out << "mu = " << *cfg.mu << '\n';
    out << "iterations = " << cfg.iterations << '\n'
        << "seed = " << cfg.seed << '\n'
        << "regularizer = " << to_string(cfg.formulation) << '\n'
        << "frame = " << (cfg.frame == FrameFamily::OrthogonalHaar ? "orthogonal" : "undecimated") << '\n'
        << "levels = " << cfg.levels << '\n'
        << "tv_iterations = " << cfg.tv.inner_iterations << '\n'
        << "tv_step = " << cfg.tv.dual_step << '\n'
        << "tv_warm_start = " << (cfg.tv.warm_start ? "true" : "false") << '\n'
        << "dynamic_range_db = " << cfg.dynamic_range_db << '\n'
        << "squares = " << cfg.squares << '\n'
        << "missing_fraction = " << cfg.missing_fraction << '\n'
        << "snr_db = " << cfg.snr_db << '\n'
        << "kernel_support = " << cfg.kernel_support << '\n'
        << "gaussian_variance = " << cfg.gaussian_variance << '\n';
    if (!cfg.image.empty()) out << "image = " << cfg.image << '\n';
    out << "warm_start = " << (cfg.warm_start ? "true" : "false") << '\n'
        << "feasibility_slack = " << cfg.feasibility_slack << '\n'
        << "objective_rel_tol = " << cfg.objective_rel_tol << '\n'
        << "stop_on_convergence = " << (cfg.stop_on_convergence ? "true" : "false") << '\n';
    return out.str();
}

PreparedExperiment prepare_experiment(const ExperimentConfig& cfg)
{
    const std::string& e = cfg.experiment;
    (void)default_experiment(e);
    const std::uint64_t image_seed = derive_seed(cfg.seed, 1);
    const std::uint64_t mask_seed = derive_seed(cfg.seed, 2);
    const std::uint64_t noise_seed = derive_seed(cfg.seed, 3);

    auto base_image = [&]() {
        if (!cfg.image.empty()) return to_image(read_pgm(cfg.image), 255.0);
        return cartoon_image(cfg.size);
    };

    std::optional<ProblemInstance> instance;
    if (is_deblur(e)) {
        BlurKernelSpec kernel;
        double sigma = 0.0;
        if (e == "deblur-1") {
            kernel = BlurKernelSpec::uniform(cfg.kernel_support);
            sigma = 0.56;
        } else if (e == "deblur-2a" || e == "deblur-2b") {
            kernel = BlurKernelSpec::gaussian(cfg.kernel_support, cfg.gaussian_variance);
            sigma = std::sqrt(e == "deblur-2a" ? 2.0 : 8.0);
        } else {
            kernel = BlurKernelSpec::inverse_quadratic(cfg.kernel_support);
            sigma = std::sqrt(e == "deblur-3a" ? 2.0 : 8.0);
        }
        ImageGrid truth = base_image();
        if (static_cast<int>(std::min(truth.height(), truth.width())) < cfg.kernel_support) {
            throw ConfigError("image is smaller than the blur kernel", 0, "kernel_support");
        }
        LinearOperator op = LinearOperator::convolution(make_blur_kernel(kernel), truth.shape());
        instance = make_instance(e, std::move(truth), std::move(op), cfg.sigma.value_or(sigma), noise_seed, false,
                                 cfg.epsilon);
    } else if (e == "mri" || e == "hdr") {
        if (cfg.lines > cfg.size) throw ConfigError("lines must not exceed size", 0, "lines");
        ImageGrid truth = e == "mri" ? shepp_logan(cfg.size)
                                     : random_squares(cfg.size, cfg.dynamic_range_db, cfg.squares, image_seed);
        const double sigma = cfg.sigma.value_or(e == "mri" ? std::sqrt(0.5e-6) : 0.1);
        LinearOperator op = LinearOperator::partial_fourier(radial_mask(cfg.size, cfg.lines));
        instance = make_instance(e, std::move(truth), std::move(op), sigma, noise_seed, true, cfg.epsilon);
    } else {
        ImageGrid truth = base_image();
        const Mask mask = random_pixel_mask(truth.shape(), cfg.missing_fraction, mask_seed);
        LinearOperator op = LinearOperator::pixel_mask(mask);
        double sigma = 0.0;
        if (cfg.sigma) {
            sigma = *cfg.sigma;
        } else {
            // SNR relative to the power of the observed pixels.
            double power = 0.0;
            for (std::size_t i = 0; i < truth.size(); ++i) {
                if (mask[i]) power += truth[i] * truth[i];
            }
            power /= static_cast<double>(count_true(mask));
            sigma = std::sqrt(power / std::pow(10.0, cfg.snr_db / 10.0));
        }
        instance = make_instance(e, std::move(truth), std::move(op), sigma, noise_seed, false, cfg.epsilon);
    }
    instance->name = cfg.name;

    SolverChoice choice;
    choice.formulation = cfg.formulation;
    choice.frame = cfg.frame;
    choice.levels = cfg.levels;
    choice.tv = cfg.tv;

    SolverConfig solver;
    solver.mu = cfg.mu.value_or(default_mu(e, cfg.formulation));
    solver.epsilon = instance->epsilon;
    solver.max_iterations = cfg.iterations;
    solver.feasibility_slack = cfg.feasibility_slack;
    solver.objective_rel_tol = cfg.objective_rel_tol;
    solver.stop_on_convergence = cfg.stop_on_convergence;
    solver.warm_start_adjoint = cfg.warm_start;
    return PreparedExperiment{std::move(*instance), choice, solver};
}

}  // namespace csalsa
