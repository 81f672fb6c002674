#include <gtest/gtest.h>

#include "csalsa/prox.hpp"
#include "test_util.hpp"

using namespace csalsa;

namespace {

// Forward differences, zero where the difference would leave the grid.
void grad(const RVec& x, std::size_t h, std::size_t w, RVec& gx, RVec& gy)
{
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            const std::size_t i = r * w + c;
            gx[i] = c + 1 < w ? x[i + 1] - x[i] : 0.0;
            gy[i] = r + 1 < h ? x[i + w] - x[i] : 0.0;
        }
    }
}

// Adjoint of grad.
void grad_t(const RVec& gx, const RVec& gy, std::size_t h, std::size_t w, RVec& out)
{
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            const std::size_t i = r * w + c;
            if (c + 1 < w) {
                out[i + 1] += gx[i];
                out[i] -= gx[i];
            }
            if (r + 1 < h) {
                out[i + w] += gy[i];
                out[i] -= gy[i];
            }
        }
    }
}

double tv(const RVec& x, std::size_t h, std::size_t w)
{
    RVec gx(x.size()), gy(x.size());
    grad(x, h, w, gx, gy);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::hypot(gx[i], gy[i]);
    return s;
}

double denoise_objective(const RVec& x, const RVec& v, double tau, std::size_t h, std::size_t w)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += 0.5 * (x[i] - v[i]) * (x[i] - v[i]);
    return s + tau * tv(x, h, w);
}

// Primal-dual hybrid gradient (Chambolle-Pock) on min 1/2||x - v||^2 + tau TV(x).
RVec pdhg_tv(const RVec& v, double tau, std::size_t h, std::size_t w, int iterations)
{
    const std::size_t n = v.size();
    const double L = std::sqrt(8.0);
    const double s = 1.0 / L, t = 1.0 / L;
    RVec x = v, xbar = v, px(n), py(n), gx(n), gy(n), gt(n);
    for (int k = 0; k < iterations; ++k) {
        grad(xbar, h, w, gx, gy);
        for (std::size_t i = 0; i < n; ++i) {
            const double ax = px[i] + s * gx[i], ay = py[i] + s * gy[i];
            const double scale = std::max(1.0, std::hypot(ax, ay) / tau);
            px[i] = ax / scale;
            py[i] = ay / scale;
        }
        grad_t(px, py, h, w, gt);
        for (std::size_t i = 0; i < n; ++i) {
            const double prev = x[i];
            x[i] = (x[i] - t * gt[i] + t * v[i]) / (1.0 + t);
            xbar[i] = 2.0 * x[i] - prev;
        }
    }
    return x;
}

}  // namespace

TEST(SoftThreshold, MatchesScalarGridMinimizer)
{
    for (double tau : {0.4, 1.0, 2.5}) {
        for (double v : {-3.0, -0.5, 0.0, 0.2, 1.7, 4.0}) {
            double best = 0.0, best_val = 1e300;
            for (int i = -6000; i <= 6000; ++i) {
                const double x = i * 1e-3;
                const double f = 0.5 * (x - v) * (x - v) + tau * std::abs(x);
                if (f < best_val) best_val = f, best = x;
            }
            const RVec out = soft_threshold(std::span<const double>(&v, 1), tau);
            EXPECT_NEAR(out[0], best, 2e-3) << "v=" << v << " tau=" << tau;
        }
    }
}

TEST(SoftThreshold, ComplexMatchesPlanarGridMinimizer)
{
    const double tau = 0.7;
    for (cplx v : {cplx{1.2, -0.9}, cplx{0.3, 0.2}, cplx{-2.0, 0.5}}) {
        cplx best;
        double best_val = 1e300;
        for (int a = -800; a <= 800; ++a) {
            for (int b = -800; b <= 800; ++b) {
                const cplx x = v + cplx{a * 1e-3, b * 1e-3};
                const double f = 0.5 * std::norm(x - v) + tau * std::abs(x);
                if (f < best_val) best_val = f, best = x;
            }
        }
        const CVec out = soft_threshold(std::span<const cplx>(&v, 1), tau);
        EXPECT_LE(std::abs(out[0] - best), 2e-3) << v;
    }
}

TEST(SoftThreshold, ClosedFormValues)
{
    const RVec v = {-3.0, -0.2, 0.0, 0.3, 2.0};
    const RVec out = soft_threshold(v, 0.5);
    const RVec want = {-2.5, 0.0, 0.0, 0.0, 1.5};
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_DOUBLE_EQ(out[i], want[i]);
    const CVec c = {cplx{3.0, 4.0}};
    EXPECT_LE(std::abs(soft_threshold(c, 1.0)[0] - cplx{2.4, 3.2}), 1e-15);
    EXPECT_THROW(soft_threshold(v, -1.0), DomainError);
}

TEST(SoftThreshold, Nonexpansive)
{
    std::mt19937_64 rng(1);
    for (int t = 0; t < 50; ++t) {
        const CVec a = test::random_complex(30, rng), b = test::random_complex(30, rng);
        EXPECT_LE(norm2(subtract(soft_threshold(a, 0.8), soft_threshold(b, 0.8))), norm2(subtract(a, b)) + 1e-14);
    }
}

TEST(ProjectBall, MatchesPlanarGridMinimizer)
{
    struct Case {
        RVec s, c;
        double r;
    };
    for (const Case& k : {Case{{2.0, 1.0}, {1.0, 1.0}, 0.5}, Case{{0.3, -0.4}, {0.0, 0.0}, 1.0},
                          Case{{-2.0, 3.0}, {0.5, 0.5}, 1.5}}) {
        double bx = 0, by = 0, best = 1e300;
        for (int a = -2000; a <= 2000; ++a) {
            for (int b = -2000; b <= 2000; ++b) {
                const double x = k.c[0] + a * k.r / 2000.0, y = k.c[1] + b * k.r / 2000.0;
                if (std::hypot(x - k.c[0], y - k.c[1]) > k.r) continue;
                const double f = std::hypot(x - k.s[0], y - k.s[1]);
                if (f < best) best = f, bx = x, by = y;
            }
        }
        const Observation out = project_ball(to_complex(k.s), BallConstraint{to_complex(k.c), k.r});
        EXPECT_NEAR(out[0].real(), bx, 2e-3);
        EXPECT_NEAR(out[1].real(), by, 2e-3);
    }
}

TEST(ProjectBall, ClosedFormAndIdempotent)
{
    const BallConstraint ball{CVec{cplx{1.0, 0.0}, cplx{1.0, 0.0}}, 0.5};
    const Observation p = project_ball(CVec{cplx{2.0, 0.0}, cplx{1.0, 0.0}}, ball);
    EXPECT_NEAR(p[0].real(), 1.5, 1e-15);
    EXPECT_NEAR(p[1].real(), 1.0, 1e-15);
    EXPECT_EQ(project_ball(p, ball), p);

    std::mt19937_64 rng(2);
    const BallConstraint big{test::random_complex(40, rng), 2.0};
    for (int t = 0; t < 20; ++t) {
        const Observation q = project_ball(test::random_complex(40, rng), big);
        EXPECT_LE(norm2(subtract(q, big.center)), 2.0 * (1 + 1e-12));
        EXPECT_EQ(project_ball(q, big), q);
    }
    // Inside points are untouched.
    const CVec inside = {cplx{1.1, 0.1}, cplx{0.9, 0.0}};
    EXPECT_EQ(project_ball(inside, ball), inside);
    EXPECT_THROW(project_ball(CVec(3), ball), DomainError);
}

TEST(TvNorm, HandValues)
{
    // Vertical step of height 1 across a 3-wide image: three unit jumps.
    ImageGrid step(Shape{2, 3}, RVec{0, 0, 0, 1, 1, 1});
    EXPECT_DOUBLE_EQ(tv_norm(step), 3.0);
    // Bright top-left pixel: only its own gradient (-1, -1) is non-zero.
    ImageGrid dot(Shape{2, 2}, RVec{1, 0, 0, 0});
    EXPECT_NEAR(tv_norm(dot), std::sqrt(2.0), 1e-15);
    ImageGrid flat(Shape{4, 4}, 7.0);
    EXPECT_EQ(tv_norm(flat), 0.0);
}

class TvProxOracle : public ::testing::TestWithParam<double> {};

TEST_P(TvProxOracle, ObjectiveMatchesPrimalDualOracle)
{
    const double tau = GetParam();
    std::mt19937_64 rng(static_cast<std::uint64_t>(tau * 1000));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 5; ++t) {
        RVec v(16);
        for (double& x : v) x = u(rng);
        TvSettings settings;
        settings.inner_iterations = 2000;
        const ImageGrid out = tv_prox(ImageGrid(Shape{4, 4}, v), tau, settings);
        const RVec ref = pdhg_tv(v, tau, 4, 4, 100000);
        const double f = denoise_objective(out.values(), v, tau, 4, 4);
        const double f_ref = denoise_objective(ref, v, tau, 4, 4);
        EXPECT_LE(std::abs(f - f_ref), 1e-4) << "tau=" << tau;
    }
}

INSTANTIATE_TEST_SUITE_P(Weights, TvProxOracle, ::testing::Values(0.05, 0.25, 1.0));

TEST(TvProx, BasicProperties)
{
    std::mt19937_64 rng(3);
    const RVec v = test::random_real(64, rng);
    const ImageGrid img(Shape{8, 8}, v);
    TvSettings s;
    s.inner_iterations = 50;
    const ImageGrid out = tv_prox(img, 0.3, s);
    double mean_in = 0, mean_out = 0;
    for (std::size_t i = 0; i < 64; ++i) mean_in += v[i], mean_out += out[i];
    EXPECT_NEAR(mean_in, mean_out, 1e-10);
    EXPECT_LT(tv_norm(out), tv_norm(img));
    EXPECT_EQ(tv_prox(img, 0.0, s), img);
    const ImageGrid flat(Shape{8, 8}, 3.0);
    const ImageGrid f = tv_prox(flat, 1.0, s);
    for (double x : f.values()) EXPECT_NEAR(x, 3.0, 1e-14);
    EXPECT_THROW(tv_prox(CVec(10), Shape{3, 3}, 1.0, s), DomainError);
}

TEST(TvProx, WarmStartContinuesTheDualIteration)
{
    std::mt19937_64 rng(4);
    const CVec v = to_complex(test::random_real(36, rng));
    const Shape shape{6, 6};
    TvSettings five;
    five.inner_iterations = 5;
    TvSettings ten;
    ten.inner_iterations = 10;
    TvDualField dual;
    (void)tv_prox(v, shape, 0.4, five, &dual);
    const CVec warm = tv_prox(v, shape, 0.4, five, &dual);
    const CVec cold = tv_prox(v, shape, 0.4, ten);
    EXPECT_LE(test::rel_err(warm, cold), 1e-13);
}

TEST(Regularizer, DispatchesToPrimitives)
{
    std::mt19937_64 rng(5);
    const CVec v = test::random_complex(16, rng);
    const Regularizer l1 = Regularizer::l1();
    EXPECT_EQ(l1.prox(v, 0.5), soft_threshold(v, 0.5));
    EXPECT_DOUBLE_EQ(l1.evaluate(v), l1_norm(v));
    TvSettings s;
    s.inner_iterations = 7;
    const Regularizer tvr = Regularizer::isotropic_tv(s);
    EXPECT_EQ(tvr.prox(v, 0.5, Shape{4, 4}), tv_prox(v, Shape{4, 4}, 0.5, s));
    EXPECT_THROW(tvr.prox(v, 0.5), DomainError);
}
