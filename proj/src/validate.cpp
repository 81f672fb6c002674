#include "csalsa/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include "csalsa/config.hpp"
#include "csalsa/dense_oracle.hpp"
#include "csalsa/fft.hpp"
#include "csalsa/harness.hpp"

namespace csalsa {
namespace {

using Rng = std::mt19937_64;

CVec random_cvec(std::size_t n, Rng& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    CVec v(n);
    for (cplx& x : v) x = {g(rng), g(rng)};
    return v;
}

RVec random_rvec(std::size_t n, Rng& rng, double scale = 1.0)
{
    std::normal_distribution<double> g(0.0, scale);
    RVec v(n);
    for (double& x : v) x = g(rng);
    return v;
}

double rel_diff(std::span<const cplx> a, std::span<const cplx> b)
{
    return norm2(subtract(a, b)) / std::max(norm2(b), 1e-300);
}

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Family {
    std::string name;
    LinearOperator op;
    dense::Matrix A;
    bool selection = false;
};

std::vector<Family> families(Rng& rng)
{
    const Shape shape{8, 8};
    const ImageGrid kernel = make_blur_kernel(BlurKernelSpec::gaussian(3, 1.0));
    const Frame frame(FrameFamily::UndecimatedHaar, 2, shape);
    const dense::Matrix W =
        dense::from_columns(shape.size(), frame.coefficient_size(), [&](std::span<const cplx> c) { return frame.synthesis(c); });

    Mask pixels(shape, 0);
    std::bernoulli_distribution keep(0.6);
    for (auto& v : pixels.values()) v = keep(rng) ? 1 : 0;
    pixels[0] = 1;

    Mask freqs(shape, 0);
    std::vector<std::size_t> idx(shape.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < 20; ++i) freqs[idx[i]] = 1;

    const LinearOperator conv = LinearOperator::convolution(kernel, shape);
    const LinearOperator mask = LinearOperator::pixel_mask(pixels);
    const LinearOperator fourier = LinearOperator::partial_fourier(freqs);
    const dense::Matrix Bc = dense::circulant(kernel, shape);
    const dense::Matrix Bm = dense::selection(pixels);
    const dense::Matrix Bf = dense::selection(freqs) * dense::dft(shape);

    return {
        {"convolution-analysis", conv, Bc, false},
        {"convolution-synthesis", conv.composed_with(frame), Bc * W, false},
        {"mask-analysis", mask, Bm, true},
        {"mask-synthesis", mask.composed_with(frame), Bm * W, false},
        {"fourier-analysis", fourier, Bf, true},
        {"fourier-synthesis", fourier.composed_with(frame), Bf * W, false},
    };
}

// Independent TV pieces for the projected-gradient oracle.
void oracle_grad(const RVec& u, Shape s, RVec& gx, RVec& gy)
{
    for (std::size_t i = 0; i < s.height; ++i) {
        for (std::size_t j = 0; j < s.width; ++j) {
            const std::size_t k = i * s.width + j;
            gx[k] = j + 1 < s.width ? u[k + 1] - u[k] : 0.0;
            gy[k] = i + 1 < s.height ? u[k + s.width] - u[k] : 0.0;
        }
    }
}

// Transpose of oracle_grad.
RVec oracle_grad_t(const RVec& px, const RVec& py, Shape s)
{
    RVec out(px.size(), 0.0);
    for (std::size_t i = 0; i < s.height; ++i) {
        for (std::size_t j = 0; j < s.width; ++j) {
            const std::size_t k = i * s.width + j;
            if (j + 1 < s.width) {
                out[k + 1] += px[k];
                out[k] -= px[k];
            }
            if (i + 1 < s.height) {
                out[k + s.width] += py[k];
                out[k] -= py[k];
            }
        }
    }
    return out;
}

double tv_objective(const RVec& x, const RVec& v, Shape s, double tau)
{
    RVec gx(x.size()), gy(x.size());
    oracle_grad(x, s, gx, gy);
    double fit = 0.0, tv = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        fit += 0.5 * (x[k] - v[k]) * (x[k] - v[k]);
        tv += std::hypot(gx[k], gy[k]);
    }
    return fit + tau * tv;
}

/// Minimizer of 1/2||x - v||^2 + tau TV(x) by projected gradient on the dual:
/// x = v - tau G^T p, |p_i| <= 1.
RVec tv_prox_projected_gradient(const RVec& v, Shape s, double tau, int iterations)
{
    const std::size_t n = v.size();
    RVec px(n, 0.0), py(n, 0.0), gx(n), gy(n);
    const double step = 1.0 / (8.0 * tau);
    RVec x = v;
    for (int it = 0; it < iterations; ++it) {
        oracle_grad(x, s, gx, gy);
        for (std::size_t k = 0; k < n; ++k) {
            const double qx = px[k] + step * gx[k];
            const double qy = py[k] + step * gy[k];
            const double m = std::max(1.0, std::hypot(qx, qy));
            px[k] = qx / m;
            py[k] = qy / m;
        }
        const RVec gt = oracle_grad_t(px, py, s);
        for (std::size_t k = 0; k < n; ++k) x[k] = v[k] - tau * gt[k];
    }
    return x;
}

}  // namespace

std::vector<PropertyResult> run_property_suite(std::uint64_t seed)
{
    std::vector<PropertyResult> results;
    Rng rng(seed);

    auto check = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
        const auto t0 = std::chrono::steady_clock::now();
        PropertyResult r{name, false, {}, 0.0};
        try {
            auto [ok, detail] = body();
            r.passed = ok;
            r.detail = std::move(detail);
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        results.push_back(std::move(r));
    };

    // ---- DFT -----------------------------------------------------------------
    check("dft parseval", [&] {
        const Shape s{16, 12};
        double worst = 0.0;
        for (int t = 0; t < 10; ++t) {
            const CVec x = random_cvec(s.size(), rng);
            const CVec X = fft::forward(x, s);
            worst = std::max(worst, std::abs(norm2(X) - norm2(x)) / norm2(x));
            worst = std::max(worst, rel_diff(fft::inverse(X, s), x));
        }
        return std::pair{worst <= 1e-12, "max rel err " + sci(worst)};
    });

    // ---- operators -------------------------------------------------------------
    const std::vector<Family> fams = families(rng);
    for (const Family& f : fams) {
        check("adjoint identity " + f.name, [&] {
            double worst = 0.0;
            for (int t = 0; t < 100; ++t) {
                const CVec x = random_cvec(f.op.domain_size(), rng);
                const CVec r = random_cvec(f.op.range_size(), rng);
                const CVec Ax = f.op.forward(x);
                const CVec Ahr = f.op.adjoint(r);
                const double gap = std::abs(inner(Ax, r) - inner(x, Ahr));
                worst = std::max(worst, gap / (norm2(Ax) * norm2(r) + norm2(x) * norm2(Ahr)));
            }
            return std::pair{worst <= 1e-10, "max scaled gap " + sci(worst)};
        });
    }
    for (const Family& f : fams) {
        check("inverse identity " + f.name, [&] {
            double worst = 0.0;
            for (int t = 0; t < 10; ++t) {
                const CVec r = random_cvec(f.op.domain_size(), rng);
                const CVec s = f.op.shifted_normal_inverse(r);
                const CVec back = add(s, f.op.adjoint(f.op.forward(s)));
                worst = std::max(worst, rel_diff(back, r));
            }
            return std::pair{worst <= 1e-8, "max rel err " + sci(worst)};
        });
    }
    for (const Family& f : fams) {
        check("dense oracle " + f.name, [&] {
            double worst = 0.0;
            for (int t = 0; t < 3; ++t) {
                const CVec x = random_cvec(f.op.domain_size(), rng);
                worst = std::max(worst, rel_diff(f.op.forward(x), dense::from_eigen(f.A * dense::to_eigen(x))));
                worst = std::max(worst, rel_diff(f.op.shifted_normal_inverse(x), dense::shifted_normal_solve(f.A, x)));
            }
            return std::pair{worst <= 1e-8, "max rel err " + sci(worst)};
        });
    }
    for (const Family& f : fams) {
        if (!f.selection) continue;
        check("selection rows " + f.name, [&] {
            double worst = 0.0;
            for (int t = 0; t < 10; ++t) {
                const CVec r = random_cvec(f.op.range_size(), rng);
                worst = std::max(worst, rel_diff(f.op.forward(f.op.adjoint(r)), r));
            }
            return std::pair{worst <= 1e-12, "max rel err " + sci(worst)};
        });
    }

    // ---- frames ----------------------------------------------------------------
    check("frame parseval, adjoint, energy", [&] {
        const Shape s{32, 32};
        double worst = 0.0;
        for (FrameFamily fam : {FrameFamily::OrthogonalHaar, FrameFamily::UndecimatedHaar}) {
            for (int L = 1; L <= 4; ++L) {
                const Frame frame(fam, L, s);
                const CVec x = random_cvec(s.size(), rng);
                const CVec c = random_cvec(frame.coefficient_size(), rng);
                const CVec Px = frame.analysis(x);
                const CVec Wc = frame.synthesis(c);
                worst = std::max(worst, rel_diff(frame.synthesis(Px), x));
                worst = std::max(worst, std::abs(inner(Wc, x) - inner(c, Px)) / (norm2(c) * norm2(x)));
                worst = std::max(worst, std::abs(norm2(Px) - norm2(x)) / norm2(x));
            }
        }
        return std::pair{worst <= 1e-10, "max rel err " + sci(worst)};
    });
    check("frame projector idempotent", [&] {
        const Frame frame(FrameFamily::UndecimatedHaar, 4, Shape{32, 32});
        const CVec c = random_cvec(frame.coefficient_size(), rng);
        const CVec q = frame.analysis(frame.synthesis(c));
        const CVec qq = frame.analysis(frame.synthesis(q));
        const double err = rel_diff(qq, q);
        const double gap = rel_diff(q, c);
        return std::pair{err <= 1e-10 && gap > 1e-3, "idempotence err " + sci(err) + ", distance from identity " + sci(gap)};
    });

    // ---- prox ------------------------------------------------------------------
    check("soft threshold grid oracle", [&] {
        const double v = 1.7, tau = 0.4;
        double best = 0.0, best_val = 1e300;
        for (int i = 0; i <= 60000; ++i) {
            const double x = -3.0 + 1e-4 * i;
            const double f = 0.5 * (x - v) * (x - v) + tau * std::abs(x);
            if (f < best_val) {
                best_val = f;
                best = x;
            }
        }
        const double z = soft_threshold(std::span<const double>(&v, 1), tau)[0];
        return std::pair{std::abs(z - best) <= 1e-3 && std::abs(z - 1.3) <= 1e-12, "prox " + sci(z) + " grid " + sci(best)};
    });
    check("soft threshold optimality", [&] {
        const RVec v = random_rvec(50, rng);
        const double tau = 0.3;
        const RVec z = soft_threshold(v, tau);
        auto f = [&](const RVec& x) {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) s += 0.5 * (x[i] - v[i]) * (x[i] - v[i]) + tau * std::abs(x[i]);
            return s;
        };
        const double fz = f(z);
        int bad = 0;
        for (int t = 0; t < 100; ++t) {
            RVec d = random_rvec(v.size(), rng);
            const double nd = norm2(std::span<const double>(d));
            RVec zd = z;
            for (std::size_t i = 0; i < d.size(); ++i) zd[i] += 1e-3 * d[i] / nd;
            if (f(zd) < fz) ++bad;
        }
        return std::pair{bad == 0, std::to_string(bad) + " improving perturbations"};
    });
    check("prox nonexpansive", [&] {
        double worst = 0.0;
        BallConstraint ball{random_cvec(20, rng), 1.5};
        for (int t = 0; t < 100; ++t) {
            const CVec a = random_cvec(20, rng), b = random_cvec(20, rng);
            const double dab = norm2(subtract(a, b));
            worst = std::max(worst, norm2(subtract(soft_threshold(a, 0.5), soft_threshold(b, 0.5))) / dab);
            worst = std::max(worst, norm2(subtract(project_ball(a, ball), project_ball(b, ball))) / dab);
        }
        return std::pair{worst <= 1.0 + 1e-12, "max ratio " + sci(worst)};
    });
    check("ball projection grid oracle", [&] {
        const BallConstraint ball{{1.0, 1.0}, 0.5};
        const CVec s{2.0, 1.0};
        double bx = 0, by = 0, best = 1e300;
        for (int i = 0; i <= 1000; ++i) {
            for (int j = 0; j <= 1000; ++j) {
                const double x = 0.5 + 1e-3 * i, y = 0.5 + 1e-3 * j;
                if (std::hypot(x - 1.0, y - 1.0) > 0.5) continue;
                const double f = 0.5 * ((x - 2.0) * (x - 2.0) + (y - 1.0) * (y - 1.0));
                if (f < best) {
                    best = f;
                    bx = x;
                    by = y;
                }
            }
        }
        const CVec p = project_ball(s, ball);
        const double err = std::max(std::abs(p[0].real() - bx), std::abs(p[1].real() - by));
        const double exact = std::max(std::abs(p[0].real() - 1.5), std::abs(p[1].real() - 1.0));
        return std::pair{err <= 2e-3 && exact <= 1e-12, "grid distance " + sci(err)};
    });
    check("ball projection idempotent", [&] {
        const BallConstraint ball{random_cvec(30, rng), 2.0};
        bool ok = true;
        for (int t = 0; t < 100; ++t) {
            CVec s = random_cvec(30, rng);
            for (cplx& x : s) x *= 3.0;
            const CVec p = project_ball(s, ball);
            ok = ok && project_ball(p, ball) == p && norm2(subtract(p, ball.center)) <= 2.0 * (1 + 1e-12);
        }
        return std::pair{ok, ok ? "exact" : "projection moved a projected point"};
    });
    check("tv prox projected-gradient oracle", [&] {
        const Shape s{4, 4};
        const RVec v = random_rvec(s.size(), rng);
        const double tau = 0.25;
        TvSettings settings;
        settings.inner_iterations = 2000;
        const ImageGrid x = tv_prox(ImageGrid(s, v), tau, settings);
        const RVec ref = tv_prox_projected_gradient(v, s, tau, 100000);
        const double gap = std::abs(tv_objective(x.values(), v, s, tau) - tv_objective(ref, v, s, tau));
        return std::pair{gap <= 1e-4, "objective gap " + sci(gap)};
    });
    check("tv prox monotone objective", [&] {
        const Shape s{16, 16};
        const RVec v = random_rvec(s.size(), rng, 10.0);
        const double tau = 2.0;
        double prev = tv_objective(v, v, s, tau), worst = 0.0;
        for (int k = 1; k <= 30; ++k) {
            TvSettings settings{k, 0.125, false};
            const double obj = tv_objective(tv_prox(ImageGrid(s, v), tau, settings).values(), v, s, tau);
            worst = std::max(worst, (obj - prev) / std::max(1.0, std::abs(prev)));
            prev = obj;
        }
        return std::pair{worst <= 1e-10, "max relative increase " + sci(worst)};
    });
    check("tv norm hand value", [&] {
        const double tv = tv_norm(ImageGrid(Shape{2, 2}, RVec{0, 1, 0, 1}));
        return std::pair{std::abs(tv - 2.0) <= 1e-15, "tv " + sci(tv)};
    });

    // ---- solver ----------------------------------------------------------------
    check("solver 1D analytic solution", [&] {
        const LinearOperator op = LinearOperator::pixel_mask(Mask(Shape{1, 1}, 1));
        double worst = 0.0;
        for (double mu : {0.1, 1.0, 10.0}) {
            SolverConfig cfg;
            cfg.mu = mu;
            cfg.epsilon = 1.0;
            cfg.max_iterations = 200;
            cfg.stop_on_convergence = false;
            const SolveResult r = csalsa1_solve(op, Observation{5.0}, Regularizer::l1(), cfg);
            worst = std::max(worst, std::abs(r.image[0] - 4.0));
        }
        return std::pair{worst <= 1e-6, "max |x - 4| " + sci(worst)};
    });
    check("solver iteration invariants", [&] {
        const Shape s{16, 16};
        const LinearOperator op = LinearOperator::convolution(make_blur_kernel(BlurKernelSpec::uniform(3)), s);
        RVec truth = random_rvec(s.size(), rng);
        const ProblemInstance inst = make_instance("check", ImageGrid(s, truth), op, 0.1, seed, false);
        SolverConfig cfg;
        cfg.mu = 1.0;
        cfg.epsilon = inst.epsilon;
        const SplitSpec split = csalsa1_split(op, inst.observation, Regularizer::l1(), cfg);
        SolverState state = initial_state(split);
        bool dual_ok = true, feasible = true;
        double grad_worst = 0.0, mu_gap = 0.0;
        for (int k = 0; k < 20; ++k) {
            const SolverState before = state;
            admm2_step(state, split, cfg);
            // u-update optimality: sum_j H_j^H (H_j u - zeta_j) = 0.
            CVec grad(state.u.size(), cplx{});
            double zeta_norm2 = 0.0;
            for (std::size_t j = 0; j < split.blocks.size(); ++j) {
                const CVec zeta = add(before.v[j], before.d[j]);
                zeta_norm2 += squared_norm(zeta);
                const CVec g = split.blocks[j].map.adjoint(subtract(split.blocks[j].map.apply(state.u), zeta));
                for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g[i];
                const CVec Hu = split.blocks[j].map.apply(state.u);
                for (std::size_t i = 0; i < Hu.size(); ++i) {
                    dual_ok = dual_ok && state.d[j][i] == before.d[j][i] - Hu[i] + state.v[j][i];
                }
            }
            grad_worst = std::max(grad_worst, norm2(grad) / std::max(std::sqrt(zeta_norm2), 1e-300));
            feasible = feasible && norm2(subtract(state.v[1], inst.observation)) <= inst.epsilon * (1 + 1e-12);
            const CVec arg = subtract(split.blocks[1].map.apply(state.u), state.d[1]);
            const CVec p1 = split.blocks[1].g.prox(arg, 0.1);
            for (double mu : {1.0, 10.0}) mu_gap = std::max(mu_gap, norm2(subtract(split.blocks[1].g.prox(arg, mu), p1)));
        }
        const bool ok = dual_ok && feasible && grad_worst <= 1e-8 && mu_gap == 0.0;
        return std::pair{ok, std::string("dual ") + (dual_ok ? "exact" : "MISMATCH") + ", feasible " +
                                 (feasible ? "yes" : "NO") + ", gradient " + sci(grad_worst) + ", mu gap " + sci(mu_gap)};
    });

    // ---- harness ---------------------------------------------------------------
    check("epsilon rule", [&] {
        const double a = epsilon_rule(1, 1.0), b = epsilon_rule(65536, 0.56), c = epsilon_rule(100, 0.0);
        const bool ok = std::abs(a - 3.0) <= 1e-15 && std::abs(b - 145.58) <= 0.01 && c == 0.0;
        return std::pair{ok, "eps(65536, 0.56) = " + sci(b)};
    });
    check("instance reproducibility", [&] {
        bool ok = true;
        for (const std::string name : {"deblur-1", "mri", "inpainting"}) {
            ExperimentConfig cfg = default_experiment(name);
            cfg.size = 32;
            cfg.lines = 8;
            cfg.seed = seed;
            ok = ok && prepare_experiment(cfg).instance.observation == prepare_experiment(cfg).instance.observation;
        }
        return std::pair{ok, ok ? "bit-identical" : "observations differ"};
    });

    return results;
}

}  // namespace csalsa
