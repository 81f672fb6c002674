#include "csalsa/harness.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace csalsa {

double epsilon_rule(std::size_t m, double sigma)
{
    if (m < 1) throw DomainError("epsilon rule needs m >= 1");
    if (!(sigma >= 0.0)) throw DomainError("epsilon rule needs sigma >= 0");
    const double md = static_cast<double>(m);
    return std::sqrt(md + 8.0 * std::sqrt(md)) * sigma;
}

ImageGrid make_blur_kernel(const BlurKernelSpec& spec)
{
    if (spec.support < 1 || spec.support % 2 == 0) throw DomainError("blur kernel support must be odd and positive");
    if (spec.kind == BlurKernelSpec::Kind::Gaussian && !(spec.variance > 0.0)) {
        throw DomainError("Gaussian blur needs a positive variance");
    }
    const auto s = static_cast<std::size_t>(spec.support);
    const int half = spec.support / 2;
    ImageGrid k(Shape{s, s});
    for (int i = -half; i <= half; ++i) {
        for (int j = -half; j <= half; ++j) {
            double v = 1.0;
            switch (spec.kind) {
            case BlurKernelSpec::Kind::Uniform: v = 1.0; break;
            case BlurKernelSpec::Kind::Gaussian: v = std::exp(-(i * i + j * j) / (2.0 * spec.variance)); break;
            case BlurKernelSpec::Kind::InverseQuadratic: v = 1.0 / (1.0 + i * i + j * j); break;
            }
            k(static_cast<std::size_t>(i + half), static_cast<std::size_t>(j + half)) = v;
        }
    }
    const double sum = std::accumulate(k.values().begin(), k.values().end(), 0.0);
    for (double& v : k.values()) v /= sum;
    return k;
}

const std::vector<Ellipse>& shepp_logan_ellipses()
{
    static const std::vector<Ellipse> table = {
        {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
        {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
        {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
        {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
        {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
        {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
        {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
        {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
        {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
        {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
    };
    return table;
}

ImageGrid rasterize_ellipses(std::size_t n, const std::vector<Ellipse>& ellipses)
{
    if (n < 2) throw DomainError("phantom side must be at least 2");
    ImageGrid img(Shape{n, n}, 0.0);
    const double half = (static_cast<double>(n) - 1.0) / 2.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double y = (half - static_cast<double>(r)) / half;
        for (std::size_t c = 0; c < n; ++c) {
            const double x = (static_cast<double>(c) - half) / half;
            double value = 0.0;
            for (const Ellipse& e : ellipses) {
                const double phi = e.angle_deg * std::numbers::pi / 180.0;
                const double dx = x - e.x0, dy = y - e.y0;
                const double xr = dx * std::cos(phi) + dy * std::sin(phi);
                const double yr = -dx * std::sin(phi) + dy * std::cos(phi);
                if ((xr * xr) / (e.semi_x * e.semi_x) + (yr * yr) / (e.semi_y * e.semi_y) <= 1.0) value += e.intensity;
            }
            // Overlaps such as 1 - 0.8 - 0.2 leave rounding residue.
            if (std::abs(value) < 1e-9) value = 0.0;
            img(r, c) = value;
        }
    }
    return img;
}

ImageGrid shepp_logan(std::size_t n)
{
    if (n < 16) throw DomainError("Shepp-Logan phantom needs n >= 16");
    ImageGrid img = rasterize_ellipses(n, shepp_logan_ellipses());
    for (double& v : img.values()) v = std::clamp(v, 0.0, 1.0);
    return img;
}

Mask radial_mask(std::size_t n, std::size_t lines)
{
    if (lines < 1 || lines > n) throw DomainError("radial mask needs 1 <= lines <= n");
    Mask mask(Shape{n, n}, 0);
    const auto N = static_cast<long>(n);
    const double limit = static_cast<double>(n) / 2.0;
    // Symmetric sample set t = k/4, k = -2n..2n, so the rasterized line is
    // invariant under t -> -t.
    const long samples = 2 * N;
    for (std::size_t l = 0; l < lines; ++l) {
        const double theta = std::numbers::pi * static_cast<double>(l) / static_cast<double>(lines);
        const double ct = std::cos(theta), st = std::sin(theta);
        for (long k = -samples; k <= samples; ++k) {
            const double t = static_cast<double>(k) * 0.25;
            const double fx = std::round(t * ct);
            const double fy = std::round(t * st);
            if (std::abs(fx) > limit || std::abs(fy) > limit) continue;
            const long r = ((static_cast<long>(fy) % N) + N) % N;
            const long c = ((static_cast<long>(fx) % N) + N) % N;
            mask(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = 1;
        }
    }
    return mask;
}

Mask centered(const Mask& m)
{
    Mask out(m.shape(), 0);
    const std::size_t H = m.height(), W = m.width();
    for (std::size_t r = 0; r < H; ++r) {
        for (std::size_t c = 0; c < W; ++c) out((r + H / 2) % H, (c + W / 2) % W) = m(r, c);
    }
    return out;
}

ImageGrid random_squares(std::size_t n, double dynamic_range_db, int count, std::uint64_t seed)
{
    if (n < 16) throw DomainError("random squares need n >= 16");
    if (count < 1) throw DomainError("random squares need at least one square");
    if (!(dynamic_range_db >= 0.0)) throw DomainError("dynamic range must be >= 0 dB");

    std::vector<double> amplitudes(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double frac = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        amplitudes[static_cast<std::size_t>(i)] = std::pow(10.0, dynamic_range_db / 20.0 * frac);
    }
    std::mt19937_64 rng(seed);
    // Shuffle the interior amplitudes; the extremes go last.
    if (count > 2) std::shuffle(amplitudes.begin() + 1, amplitudes.end() - 1, rng);
    std::vector<double> order(amplitudes.begin() + (count > 1 ? 1 : 0), amplitudes.end() - (count > 1 ? 1 : 0));
    order.push_back(amplitudes.front());
    if (count > 1) order.push_back(amplitudes.back());

    ImageGrid img(Shape{n, n}, 0.0);
    const auto max_side = std::max<std::size_t>(4, n / 4);
    std::uniform_int_distribution<std::size_t> side_dist(4, max_side);
    for (double amp : order) {
        const std::size_t side = side_dist(rng);
        std::uniform_int_distribution<std::size_t> pos(0, n - side);
        const std::size_t r0 = pos(rng), c0 = pos(rng);
        for (std::size_t r = r0; r < r0 + side; ++r) {
            for (std::size_t c = c0; c < c0 + side; ++c) img(r, c) = amp;
        }
    }
    return img;
}

ImageGrid cartoon_image(std::size_t n)
{
    if (n < 8) throw DomainError("cartoon image needs n >= 8");
    ImageGrid img(Shape{n, n}, 60.0);
    const double N = static_cast<double>(n);
    auto inside_triangle = [](double x, double y) {
        // Vertices (0.15, 0.95), (0.45, 0.6), (0.75, 0.95) in (x, y).
        auto edge = [](double ax, double ay, double bx, double by, double px, double py) {
            return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
        };
        const double e1 = edge(0.15, 0.95, 0.45, 0.6, x, y);
        const double e2 = edge(0.45, 0.6, 0.75, 0.95, x, y);
        const double e3 = edge(0.75, 0.95, 0.15, 0.95, x, y);
        return (e1 <= 0 && e2 <= 0 && e3 <= 0) || (e1 >= 0 && e2 >= 0 && e3 >= 0);
    };
    for (std::size_t r = 0; r < n; ++r) {
        const double y = (static_cast<double>(r) + 0.5) / N;
        for (std::size_t c = 0; c < n; ++c) {
            const double x = (static_cast<double>(c) + 0.5) / N;
            double v = 60.0;
            if (x >= 0.08 && x <= 0.46 && y >= 0.08 && y <= 0.52) v = 200.0;
            if (std::hypot(x - 0.28, y - 0.3) <= 0.08) v = 20.0;
            if (std::hypot(x - 0.7, y - 0.33) <= 0.2) v = 140.0;
            if (x >= 0.55 && x <= 0.95 && y >= 0.62 && y <= 0.7) v = 100.0;
            if (inside_triangle(x, y)) v = 235.0;
            if (x >= 0.82 && y >= 0.78 && y <= 0.95) v = 175.0;
            img(r, c) = v;
        }
    }
    return img;
}

Mask random_pixel_mask(Shape shape, double missing_fraction, std::uint64_t seed)
{
    if (!(missing_fraction >= 0.0 && missing_fraction < 1.0)) {
        throw DomainError("missing fraction must be in [0, 1)");
    }
    const std::size_t n = shape.size();
    const auto missing = static_cast<std::size_t>(std::llround(missing_fraction * static_cast<double>(n)));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    Mask mask(shape, 1);
    for (std::size_t i = 0; i < missing; ++i) mask[idx[i]] = 0;
    return mask;
}

double mse(std::span<const cplx> estimate, std::span<const cplx> truth)
{
    if (estimate.size() != truth.size() || truth.empty()) throw DomainError("mse: shape mismatch");
    return squared_norm(subtract(estimate, truth)) / static_cast<double>(truth.size());
}

double mse(const ImageGrid& estimate, const ImageGrid& truth)
{
    if (!(estimate.shape() == truth.shape())) throw DomainError("mse: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double e = estimate[i] - truth[i];
        s += e * e;
    }
    return s / static_cast<double>(truth.size());
}

IsnrValue isnr(const ImageGrid& degraded, const ImageGrid& estimate, const ImageGrid& truth)
{
    if (!(degraded.shape() == truth.shape()) || !(estimate.shape() == truth.shape())) {
        throw DomainError("isnr: shape mismatch");
    }
    const double num = mse(degraded, truth);
    const double den = mse(estimate, truth);
    if (den == 0.0) return {std::numeric_limits<double>::infinity(), true};
    return {10.0 * std::log10(num / den), false};
}

ProblemInstance make_instance(std::string name, ImageGrid truth, LinearOperator op, double sigma, std::uint64_t seed,
                              bool complex_noise, std::optional<double> epsilon)
{
    if (op.is_synthesis()) throw DomainError("problem instances take the image-domain operator B");
    if (op.domain_size() != truth.size()) throw DomainError("truth image does not match operator domain");
    const Observation clean = op.forward(to_complex(truth.values()));
    Observation y = add_noise(clean, sigma, seed, complex_noise);
    const double eps = epsilon ? *epsilon : epsilon_rule(y.size(), sigma);
    if (!(eps >= 0.0)) throw DomainError("epsilon must be >= 0");
    return ProblemInstance{std::move(name), std::move(truth), std::move(op), std::move(y), sigma, eps, seed,
                           complex_noise};
}

std::string to_string(Formulation f)
{
    switch (f) {
    case Formulation::TV: return "tv";
    case Formulation::L1Analysis: return "l1-analysis";
    case Formulation::L1Synthesis: return "l1-synthesis";
    }
    return "unknown";
}

Formulation parse_formulation(const std::string& name)
{
    if (name == "tv") return Formulation::TV;
    if (name == "l1-analysis" || name == "analysis") return Formulation::L1Analysis;
    if (name == "l1-synthesis" || name == "synthesis") return Formulation::L1Synthesis;
    throw DomainError("unknown formulation '" + name + "' (expected tv, l1-analysis or l1-synthesis)");
}

ExperimentReport run_experiment(const ProblemInstance& instance, const SolverChoice& choice, SolverConfig config,
                                bool count_calls)
{
    auto counter = std::make_shared<OperatorCallCounter>();
    const LinearOperator op = count_calls ? instance.op.with_counter(counter) : instance.op;
    config.epsilon = instance.epsilon;
    config.truth = to_complex(instance.truth.values());

    SolveResult result;
    switch (choice.formulation) {
    case Formulation::TV:
        result = csalsa1_solve(op, instance.observation, Regularizer::isotropic_tv(choice.tv), config);
        break;
    case Formulation::L1Analysis: {
        const Frame frame(choice.frame, choice.levels, instance.truth.shape());
        result = csalsa2_solve(op, frame, instance.observation, Regularizer::l1(), config);
        break;
    }
    case Formulation::L1Synthesis: {
        const Frame frame(choice.frame, choice.levels, instance.truth.shape());
        result = csalsa1_solve(op.composed_with(frame), instance.observation, Regularizer::l1(), config);
        break;
    }
    }

    ExperimentReport report;
    report.name = instance.name;
    report.choice = choice;
    report.config = config;
    report.config.truth.reset();
    report.status = result.status;
    report.iterations = result.iterations;
    report.calls = *counter;
    report.epsilon = instance.epsilon;
    report.final_constraint_norm = result.last.constraint_norm;
    report.final_mse = mse(result.image, to_complex(instance.truth.values()));
    report.wall_time = result.last.wall_time;
    report.history = std::move(result.history);
    report.estimate = ImageGrid(instance.truth.shape(), real_part(result.image));
    report.estimate_max_imag = max_abs_imag(result.image);
    return report;
}

}  // namespace csalsa
