#include <gtest/gtest.h>

#include "csalsa/dense_oracle.hpp"
#include "csalsa/fft.hpp"
#include "csalsa/harness.hpp"
#include "csalsa/operators.hpp"
#include "test_util.hpp"

using namespace csalsa;
using test::rel_err;

namespace {

Mask random_mask(Shape shape, double keep, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution b(keep);
    Mask m(shape);
    for (auto& v : m.values()) v = b(rng) ? 1 : 0;
    m[0] = 1;
    return m;
}

struct Family {
    std::string name;
    LinearOperator op;
    dense::Matrix A;
};

// Dense A for every operator/formulation family on a small grid. The dense
// matrices are built from definitions only; the frame enters through its
// own synthesis columns.
std::vector<Family> families(Shape shape)
{
    const ImageGrid kernel = make_blur_kernel(BlurKernelSpec::gaussian(3, 1.0));
    const Mask pix = random_mask(shape, 0.6, 11);
    const Mask freq = random_mask(shape, 0.35, 12);
    const Frame frame(FrameFamily::UndecimatedHaar, 2, shape);
    const dense::Matrix W = dense::from_columns(shape.size(), frame.coefficient_size(),
                                                [&](std::span<const cplx> b) { return frame.synthesis(b); });

    const dense::Matrix C = dense::circulant(kernel, shape);
    const dense::Matrix S = dense::selection(pix);
    const dense::Matrix F = dense::selection(freq) * dense::dft(shape);

    std::vector<Family> out;
    out.push_back({"convolution", LinearOperator::convolution(kernel, shape), C});
    out.push_back({"mask", LinearOperator::pixel_mask(pix), S});
    out.push_back({"fourier", LinearOperator::partial_fourier(freq), F});
    out.push_back({"convolution+frame", LinearOperator::convolution(kernel, shape).composed_with(frame), C * W});
    out.push_back({"mask+frame", LinearOperator::pixel_mask(pix).composed_with(frame), S * W});
    out.push_back({"fourier+frame", LinearOperator::partial_fourier(freq).composed_with(frame), F * W});
    return out;
}

}  // namespace

class OperatorFamilies : public ::testing::TestWithParam<Shape> {};

TEST_P(OperatorFamilies, ForwardAndAdjointMatchDenseMatrix)
{
    std::mt19937_64 rng(1);
    for (const Family& f : families(GetParam())) {
        SCOPED_TRACE(f.name);
        ASSERT_EQ(f.op.domain_size(), static_cast<std::size_t>(f.A.cols()));
        ASSERT_EQ(f.op.range_size(), static_cast<std::size_t>(f.A.rows()));
        const CVec x = test::random_complex(f.op.domain_size(), rng);
        const CVec r = test::random_complex(f.op.range_size(), rng);
        EXPECT_LE(rel_err(f.op.forward(x), dense::from_eigen(f.A * dense::to_eigen(x))), 1e-12);
        EXPECT_LE(rel_err(f.op.adjoint(r), dense::from_eigen(f.A.adjoint() * dense::to_eigen(r))), 1e-12);
    }
}

TEST_P(OperatorFamilies, ShiftedNormalInverseMatchesDenseSolve)
{
    std::mt19937_64 rng(2);
    for (const Family& f : families(GetParam())) {
        SCOPED_TRACE(f.name);
        for (int t = 0; t < 3; ++t) {
            const CVec r = test::random_complex(f.op.domain_size(), rng);
            EXPECT_LE(rel_err(f.op.shifted_normal_inverse(r), dense::shifted_normal_solve(f.A, r)), 1e-8);
        }
    }
}

TEST_P(OperatorFamilies, AdjointPairing)
{
    std::mt19937_64 rng(3);
    for (const Family& f : families(GetParam())) {
        SCOPED_TRACE(f.name);
        for (int t = 0; t < 100; ++t) {
            const CVec x = test::random_complex(f.op.domain_size(), rng);
            const CVec y = test::random_complex(f.op.range_size(), rng);
            const cplx lhs = inner(f.op.forward(x), y);
            const cplx rhs = inner(x, f.op.adjoint(y));
            EXPECT_LE(std::abs(lhs - rhs), 1e-10 * norm2(x) * norm2(y));
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Grids, OperatorFamilies,
                         ::testing::Values(Shape{8, 8}, Shape{6, 10}, Shape{4, 8}),
                         [](const auto& info) {
                             return std::to_string(info.param.height) + "x" + std::to_string(info.param.width);
                         });

TEST(Operators, SelectionTypesHaveOrthonormalRows)
{
    std::mt19937_64 rng(4);
    const Shape shape{8, 8};
    for (const LinearOperator& op :
         {LinearOperator::pixel_mask(random_mask(shape, 0.5, 5)), LinearOperator::partial_fourier(random_mask(shape, 0.5, 6))}) {
        const CVec r = test::random_complex(op.range_size(), rng);
        EXPECT_LE(rel_err(op.forward(op.adjoint(r)), r), 1e-12);
    }
}

TEST(Operators, ConvolutionWithDeltaIsIdentity)
{
    ImageGrid delta(Shape{3, 3});
    delta(1, 1) = 1.0;
    const LinearOperator op = LinearOperator::convolution(delta, Shape{5, 7});
    std::mt19937_64 rng(5);
    const CVec x = test::random_complex(35, rng);
    EXPECT_LE(rel_err(op.forward(x), x), 1e-14);
    // (I + I)^{-1} = I / 2
    CVec half = x;
    for (auto& v : half) v *= 0.5;
    EXPECT_LE(rel_err(op.shifted_normal_inverse(x), half), 1e-14);
}

TEST(Operators, ConvolutionShiftsByKernelOffset)
{
    // Kernel with its only mass one column right of centre moves the image right.
    ImageGrid k(Shape{3, 3});
    k(1, 2) = 1.0;
    const LinearOperator op = LinearOperator::convolution(k, Shape{4, 4});
    CVec x(16);
    x[1 * 4 + 1] = 1.0;
    const CVec y = op.forward(x);
    EXPECT_NEAR(std::abs(y[1 * 4 + 2]), 1.0, 1e-14);
    EXPECT_NEAR(norm2(y), 1.0, 1e-14);
}

TEST(Operators, RealProblemsStayReal)
{
    const Shape shape{8, 8};
    const LinearOperator op = LinearOperator::convolution(make_blur_kernel(BlurKernelSpec::uniform(3)), shape);
    std::mt19937_64 rng(6);
    const CVec x = to_complex(test::random_real(shape.size(), rng));
    EXPECT_TRUE(op.range_is_real());
    EXPECT_LE(max_abs_imag(op.forward(x)), 1e-14);
    EXPECT_LE(max_abs_imag(op.shifted_normal_inverse(x)), 1e-14);
    EXPECT_FALSE(LinearOperator::partial_fourier(random_mask(shape, 0.5, 1)).range_is_real());
}

TEST(Operators, CustomOperatorHasNoClosedForm)
{
    auto id = [](std::span<const cplx> x) { return CVec(x.begin(), x.end()); };
    const LinearOperator op = LinearOperator::custom(4, 4, id, id);
    const CVec x(4, 1.0);
    EXPECT_EQ(op.forward(x), x);
    EXPECT_THROW(op.shifted_normal_inverse(x), CapabilityError);
}

TEST(Operators, LengthMismatchThrows)
{
    const LinearOperator op = LinearOperator::pixel_mask(random_mask(Shape{4, 4}, 0.5, 2));
    EXPECT_THROW(op.forward(CVec(15)), DomainError);
    EXPECT_THROW(op.adjoint(CVec(op.range_size() + 1)), DomainError);
    const Frame frame(FrameFamily::UndecimatedHaar, 1, Shape{8, 8});
    EXPECT_THROW(op.composed_with(frame), DomainError);
}

TEST(Operators, CounterSeesEveryApplication)
{
    auto counter = std::make_shared<OperatorCallCounter>();
    const LinearOperator base = LinearOperator::pixel_mask(random_mask(Shape{4, 4}, 0.5, 3));
    const LinearOperator op = base.with_counter(counter);
    const CVec x(16, 1.0);
    const CVec y = op.forward(x);
    (void)op.adjoint(y);
    (void)op.adjoint(y);
    (void)op.shifted_normal_inverse(x);
    EXPECT_EQ(counter->forward, 1u);
    EXPECT_EQ(counter->adjoint, 2u);
    EXPECT_EQ(counter->inverse, 1u);
    // Counting never changes the numbers.
    EXPECT_EQ(base.forward(x), y);
}

TEST(Fft, UnitaryAgainstDenseDft)
{
    const Shape shape{4, 6};
    std::mt19937_64 rng(7);
    const CVec x = test::random_complex(shape.size(), rng);
    const dense::Matrix U = dense::dft(shape);
    EXPECT_LE(rel_err(fft::forward(x, shape), dense::from_eigen(U * dense::to_eigen(x))), 1e-13);
    EXPECT_LE(rel_err(fft::inverse(fft::forward(x, shape), shape), x), 1e-14);
    EXPECT_NEAR(norm2(fft::forward(x, shape)), norm2(x), 1e-12 * norm2(x));
}

TEST(Fft, FaultHookBreaksParseval)
{
    const Shape shape{4, 4};
    const CVec x(16, 1.0);
    fft::testing::set_normalization_fault(2.0);
    const double n = norm2(fft::forward(x, shape));
    fft::testing::set_normalization_fault(1.0);
    EXPECT_NEAR(n, 2.0 * norm2(x), 1e-12);
}

TEST(Noise, DeterministicAndScaled)
{
    const Observation y(20000, 0.0);
    const Observation a = add_noise(y, 0.5, 9, false);
    EXPECT_EQ(a, add_noise(y, 0.5, 9, false));
    EXPECT_NE(a, add_noise(y, 0.5, 10, false));
    EXPECT_EQ(max_abs_imag(a), 0.0);
    EXPECT_NEAR(squared_norm(a) / 20000.0, 0.25, 0.01);
    const Observation c = add_noise(y, 0.5, 9, true);
    EXPECT_NEAR(squared_norm(c) / 20000.0, 0.25, 0.01);
    EXPECT_GT(max_abs_imag(c), 0.0);
}
