#include <gtest/gtest.h>

#include <set>

#include "csalsa/config.hpp"
#include "csalsa/harness.hpp"
#include "test_util.hpp"

using namespace csalsa;

TEST(EpsilonRule, Formula)
{
    EXPECT_DOUBLE_EQ(epsilon_rule(64, 1.0), std::sqrt(64.0 + 64.0));
    EXPECT_DOUBLE_EQ(epsilon_rule(100, 0.5), 0.5 * std::sqrt(180.0));
    EXPECT_EQ(epsilon_rule(10, 0.0), 0.0);
    EXPECT_THROW(epsilon_rule(0, 1.0), DomainError);
    EXPECT_THROW(epsilon_rule(10, -1.0), DomainError);
}

TEST(BlurKernel, Shapes)
{
    const ImageGrid u = make_blur_kernel(BlurKernelSpec::uniform(9));
    ASSERT_EQ(u.shape(), (Shape{9, 9}));
    for (double v : u.values()) EXPECT_DOUBLE_EQ(v, 1.0 / 81.0);

    const ImageGrid q = make_blur_kernel(BlurKernelSpec::inverse_quadratic(15));
    double sum = 0.0;
    for (double v : q.values()) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-14);
    EXPECT_NEAR(q(7, 7) / q(7, 8), 2.0, 1e-14);
    EXPECT_NEAR(q(7, 7) / q(0, 0), 1.0 + 49.0 + 49.0, 1e-12);

    const ImageGrid g = make_blur_kernel(BlurKernelSpec::gaussian(9, 2.0));
    EXPECT_NEAR(g(4, 4) / g(4, 5), std::exp(1.0 / 4.0), 1e-13);
    EXPECT_DOUBLE_EQ(g(0, 3), g(3, 0));
    EXPECT_THROW(make_blur_kernel(BlurKernelSpec::uniform(4)), DomainError);
    EXPECT_THROW(make_blur_kernel(BlurKernelSpec::gaussian(9, 0.0)), DomainError);
}

TEST(Phantom, RangeAndCentreValue)
{
    const ImageGrid p = shepp_logan(129);
    const auto [lo, hi] = std::minmax_element(p.values().begin(), p.values().end());
    EXPECT_EQ(*lo, 0.0);
    EXPECT_NEAR(*hi, 1.0, 1e-12);
    // Centre pixel lies in the skull and the brain only: 1 - 0.8.
    EXPECT_NEAR(p(64, 64), 0.2, 1e-12);
    EXPECT_EQ(p(0, 0), 0.0);
    EXPECT_THROW(shepp_logan(8), DomainError);
}

TEST(Phantom, EllipseRasterizerSinglePixel)
{
    // A disc of radius 0.5 on a 5 x 5 grid with centres at -1, -0.5, ..., 1.
    const ImageGrid d = rasterize_ellipses(5, {Ellipse{2.0, 0.5, 0.5, 0.0, 0.0, 0.0}});
    std::size_t inside = 0;
    for (double v : d.values()) inside += v == 2.0 ? 1 : 0;
    EXPECT_EQ(inside, 5u);
    EXPECT_EQ(d(2, 2), 2.0);
    EXPECT_EQ(d(1, 2), 2.0);
}

TEST(RadialMask, LinesThroughDc)
{
    const Mask one = radial_mask(16, 1);
    EXPECT_EQ(count_true(one), 16u);
    for (std::size_t c = 0; c < 16; ++c) EXPECT_TRUE(one(0, c));
    const Mask two = radial_mask(16, 2);
    EXPECT_EQ(count_true(two), 31u);
    for (std::size_t r = 0; r < 16; ++r) EXPECT_TRUE(two(r, 0));

    // Conjugate symmetry k -> -k keeps real images' spectra consistent.
    const std::size_t n = 64;
    const Mask m = radial_mask(n, 22);
    EXPECT_TRUE(m(0, 0));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) EXPECT_EQ(m(r, c), m((n - r) % n, (n - c) % n));
    }
    const double frac = static_cast<double>(count_true(radial_mask(128, 22))) / (128.0 * 128.0);
    EXPECT_GT(frac, 0.12);
    EXPECT_LT(frac, 0.20);
    EXPECT_TRUE(centered(m)(n / 2, n / 2));
}

TEST(RandomSquares, DynamicRangeVisible)
{
    const ImageGrid s = random_squares(128, 40.0, 15, 7);
    std::set<double> levels(s.values().begin(), s.values().end());
    EXPECT_EQ(*levels.begin(), 0.0);
    levels.erase(0.0);
    ASSERT_FALSE(levels.empty());
    EXPECT_NEAR(*levels.begin(), 1.0, 1e-12);
    EXPECT_NEAR(*levels.rbegin(), 100.0, 1e-9);
    EXPECT_EQ(s, random_squares(128, 40.0, 15, 7));
    EXPECT_NE(s, random_squares(128, 40.0, 15, 8));
}

TEST(Cartoon, PiecewiseConstant)
{
    const ImageGrid c = cartoon_image(128);
    std::set<double> levels(c.values().begin(), c.values().end());
    EXPECT_LE(levels.size(), 10u);
    EXPECT_GE(*levels.begin(), 0.0);
    EXPECT_LE(*levels.rbegin(), 255.0);
}

TEST(PixelMask, ExactMissingCount)
{
    const Mask m = random_pixel_mask(Shape{128, 128}, 0.4, 3);
    EXPECT_EQ(count_true(m), 16384u - 6554u);
    EXPECT_EQ(m, random_pixel_mask(Shape{128, 128}, 0.4, 3));
    EXPECT_NE(m, random_pixel_mask(Shape{128, 128}, 0.4, 4));
}

TEST(Metrics, MseAndIsnr)
{
    const ImageGrid truth(Shape{1, 4}, RVec{0, 1, 2, 3});
    const ImageGrid est(Shape{1, 4}, RVec{0, 1, 2, 5});
    const ImageGrid deg(Shape{1, 4}, RVec{2, 1, 2, 3});
    EXPECT_DOUBLE_EQ(mse(est, truth), 1.0);
    EXPECT_NEAR(isnr(deg, est, truth).db, 0.0, 1e-12);
    const ImageGrid worse(Shape{1, 4}, RVec{4, 1, 2, 3});
    EXPECT_NEAR(isnr(worse, est, truth).db, 10.0 * std::log10(4.0), 1e-12);
    const IsnrValue perfect = isnr(deg, truth, truth);
    EXPECT_TRUE(perfect.saturated);
    EXPECT_TRUE(std::isinf(perfect.db));
}

TEST(Instances, ReproducibleAndNearFeasible)
{
    const ImageGrid truth = shepp_logan(32);
    const LinearOperator op = LinearOperator::partial_fourier(radial_mask(32, 8));
    const ProblemInstance a = make_instance("a", truth, op, 0.01, 5, true);
    const ProblemInstance b = make_instance("a", truth, op, 0.01, 5, true);
    EXPECT_EQ(a.observation, b.observation);
    EXPECT_DOUBLE_EQ(a.epsilon, epsilon_rule(op.range_size(), 0.01));

    int within = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ProblemInstance p = make_instance("p", truth, op, 0.01, seed, true);
        within += norm2(subtract(op.forward(to_complex(truth.values())), p.observation)) <= 1.2 * p.epsilon;
    }
    EXPECT_EQ(within, 20);
    EXPECT_DOUBLE_EQ(make_instance("e", truth, op, 0.01, 1, true, 3.5).epsilon, 3.5);
}

TEST(Experiments, NoiselessIdentityIsRecovered)
{
    const ImageGrid truth = cartoon_image(16);
    const LinearOperator op = LinearOperator::pixel_mask(Mask(truth.shape(), std::uint8_t{1}));
    const ProblemInstance inst = make_instance("id", truth, op, 0.0, 1, false);
    SolverConfig c;
    c.mu = 1.0;
    c.max_iterations = 200;
    // Exact prox (l1 on frame coefficients), so the iterates land on y to
    // rounding. The TV prox runs a fixed inner count and only gets there
    // asymptotically.
    SolverChoice choice;
    choice.formulation = Formulation::L1Analysis;
    choice.levels = 2;
    const ExperimentReport r = run_experiment(inst, choice, c);
    EXPECT_EQ(r.status, StopDecision::Converged);
    EXPECT_LE(r.final_mse, 1e-20);
}

TEST(Experiments, CallCountsAndCounterAudit)
{
    ExperimentConfig cfg = default_experiment("inpainting");
    cfg.size = 32;
    cfg.iterations = 25;
    cfg.stop_on_convergence = false;
    const PreparedExperiment p = prepare_experiment(cfg);
    const ExperimentReport counted = run_experiment(p.instance, p.choice, p.solver, true);
    EXPECT_EQ(counted.iterations, 25);
    // One forward and one adjoint per iteration plus one inverse application.
    EXPECT_EQ(counted.calls.forward, 25u);
    EXPECT_EQ(counted.calls.adjoint, 25u);
    EXPECT_EQ(counted.calls.inverse, 25u);

    const ExperimentReport plain = run_experiment(p.instance, p.choice, p.solver, false);
    EXPECT_EQ(plain.calls.total(), 0u);
    EXPECT_EQ(plain.estimate, counted.estimate);
    ASSERT_EQ(plain.history.size(), counted.history.size());
    for (std::size_t i = 0; i < plain.history.size(); ++i) {
        EXPECT_EQ(plain.history[i].objective, counted.history[i].objective);
        EXPECT_EQ(plain.history[i].constraint_norm, counted.history[i].constraint_norm);
    }

    // The adjoint warm start adds one adjoint (u0 = B^H y) and one forward (v0 = B u0).
    ExperimentConfig warm = default_experiment("deblur-1");
    warm.size = 32;
    warm.iterations = 10;
    warm.stop_on_convergence = false;
    const PreparedExperiment q = prepare_experiment(warm);
    ASSERT_TRUE(q.solver.warm_start_adjoint);
    const ExperimentReport w = run_experiment(q.instance, q.choice, q.solver);
    EXPECT_EQ(w.calls.forward, 11u);
    EXPECT_EQ(w.calls.adjoint, 11u);
    EXPECT_EQ(w.calls.inverse, 10u);
}

TEST(Experiments, FormulationsShareTheInstance)
{
    ExperimentConfig cfg = default_experiment("deblur-2a");
    cfg.size = 32;
    cfg.iterations = 30;
    for (Formulation f : {Formulation::TV, Formulation::L1Analysis, Formulation::L1Synthesis}) {
        cfg.formulation = f;
        const PreparedExperiment p = prepare_experiment(cfg);
        const ExperimentReport r = run_experiment(p.instance, p.choice, p.solver);
        EXPECT_EQ(r.estimate.shape(), (Shape{32, 32}));
        EXPECT_EQ(r.estimate_max_imag, 0.0) << to_string(f);
        EXPECT_LT(r.final_mse, mse(ImageGrid(Shape{32, 32}, real_part(p.instance.observation)), p.instance.truth))
            << to_string(f);
    }
    EXPECT_EQ(parse_formulation("analysis"), Formulation::L1Analysis);
    EXPECT_EQ(parse_formulation("l1-synthesis"), Formulation::L1Synthesis);
    EXPECT_THROW(parse_formulation("l2"), DomainError);
}
