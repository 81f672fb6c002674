#pragma once

// Dense reference matrices built straight from definitions (no FFT), used to
// check the fast operators on small grids.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>

#include "csalsa/types.hpp"

namespace csalsa::dense {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline Vector to_eigen(std::span<const cplx> x)
{
    Vector v(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) v[static_cast<Eigen::Index>(i)] = x[i];
    return v;
}

inline CVec from_eigen(const Vector& v)
{
    CVec x(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) x[static_cast<std::size_t>(i)] = v[i];
    return x;
}

/// Circular convolution with a small centred kernel (centre at (kh/2, kw/2)),
/// normalized to unit sum: (Bx)[p] = sum_q k[q] x[p - q] with indices mod the
/// image shape.
inline Matrix circulant(const ImageGrid& kernel, Shape shape)
{
    const std::size_t n = shape.size();
    double sum = 0.0;
    for (double v : kernel.values()) sum += v;
    Matrix B = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const auto H = static_cast<long>(shape.height), W = static_cast<long>(shape.width);
    const auto ch = static_cast<long>(kernel.height() / 2), cw = static_cast<long>(kernel.width() / 2);
    for (long pr = 0; pr < H; ++pr) {
        for (long pc = 0; pc < W; ++pc) {
            for (long kr = 0; kr < static_cast<long>(kernel.height()); ++kr) {
                for (long kc = 0; kc < static_cast<long>(kernel.width()); ++kc) {
                    const long qr = ((pr - (kr - ch)) % H + H) % H;
                    const long qc = ((pc - (kc - cw)) % W + W) % W;
                    B(pr * W + pc, qr * W + qc) += kernel(static_cast<std::size_t>(kr), static_cast<std::size_t>(kc)) / sum;
                }
            }
        }
    }
    return B;
}

/// Rows of the identity picked by a row-major scan of the mask.
inline Matrix selection(const Mask& mask)
{
    std::size_t m = 0;
    for (auto v : mask.values()) m += v ? 1 : 0;
    Matrix S = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(mask.size()));
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) S(row++, static_cast<Eigen::Index>(i)) = 1.0;
    }
    return S;
}

/// Unitary 2D DFT matrix, U[(k,l),(r,c)] = exp(-2 pi i (k r / H + l c / W)) / sqrt(HW).
inline Matrix dft(Shape shape)
{
    const std::size_t H = shape.height, W = shape.width, n = shape.size();
    Matrix U(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t k = 0; k < H; ++k) {
        for (std::size_t l = 0; l < W; ++l) {
            for (std::size_t r = 0; r < H; ++r) {
                for (std::size_t c = 0; c < W; ++c) {
                    const double phase = -2.0 * std::numbers::pi *
                                         (static_cast<double>((k * r) % H) / static_cast<double>(H) +
                                          static_cast<double>((l * c) % W) / static_cast<double>(W));
                    U(static_cast<Eigen::Index>(k * W + l), static_cast<Eigen::Index>(r * W + c)) =
                        std::polar(scale, phase);
                }
            }
        }
    }
    return U;
}

/// Materializes a linear map from its action on the unit vectors.
inline Matrix from_columns(std::size_t rows, std::size_t cols, const std::function<CVec(std::span<const cplx>)>& apply)
{
    Matrix A(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    CVec e(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        e[j] = 1.0;
        const CVec col = apply(e);
        for (std::size_t i = 0; i < rows; ++i) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
        e[j] = 0.0;
    }
    return A;
}

/// (I + A^H A)^{-1} r by a dense LU solve.
inline CVec shifted_normal_solve(const Matrix& A, std::span<const cplx> r)
{
    const Matrix M = Matrix::Identity(A.cols(), A.cols()) + A.adjoint() * A;
    return from_eigen(M.partialPivLu().solve(to_eigen(r)));
}

}  // namespace csalsa::dense
