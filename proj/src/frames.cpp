#include "csalsa/frames.hpp"

#include <algorithm>
#include <numbers>

namespace csalsa {
namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// ---- orthogonal (decimated) Haar ------------------------------------------

template <typename T>
void haar_rows_forward(std::vector<T>& a, std::size_t stride, std::size_t rows, std::size_t cols, std::vector<T>& tmp)
{
    const std::size_t half = cols / 2;
    for (std::size_t r = 0; r < rows; ++r) {
        T* row = a.data() + r * stride;
        for (std::size_t c = 0; c < half; ++c) {
            tmp[c] = (row[2 * c] + row[2 * c + 1]) * kInvSqrt2;
            tmp[half + c] = (row[2 * c] - row[2 * c + 1]) * kInvSqrt2;
        }
        std::copy(tmp.begin(), tmp.begin() + cols, row);
    }
}

template <typename T>
void haar_rows_inverse(std::vector<T>& a, std::size_t stride, std::size_t rows, std::size_t cols, std::vector<T>& tmp)
{
    const std::size_t half = cols / 2;
    for (std::size_t r = 0; r < rows; ++r) {
        T* row = a.data() + r * stride;
        for (std::size_t c = 0; c < half; ++c) {
            tmp[2 * c] = (row[c] + row[half + c]) * kInvSqrt2;
            tmp[2 * c + 1] = (row[c] - row[half + c]) * kInvSqrt2;
        }
        std::copy(tmp.begin(), tmp.begin() + cols, row);
    }
}

template <typename T>
void haar_cols_forward(std::vector<T>& a, std::size_t stride, std::size_t rows, std::size_t cols, std::vector<T>& tmp)
{
    const std::size_t half = rows / 2;
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < half; ++r) {
            const T& x0 = a[(2 * r) * stride + c];
            const T& x1 = a[(2 * r + 1) * stride + c];
            tmp[r] = (x0 + x1) * kInvSqrt2;
            tmp[half + r] = (x0 - x1) * kInvSqrt2;
        }
        for (std::size_t r = 0; r < rows; ++r) a[r * stride + c] = tmp[r];
    }
}

template <typename T>
void haar_cols_inverse(std::vector<T>& a, std::size_t stride, std::size_t rows, std::size_t cols, std::vector<T>& tmp)
{
    const std::size_t half = rows / 2;
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < half; ++r) {
            const T& s = a[r * stride + c];
            const T& d = a[(half + r) * stride + c];
            tmp[2 * r] = (s + d) * kInvSqrt2;
            tmp[2 * r + 1] = (s - d) * kInvSqrt2;
        }
        for (std::size_t r = 0; r < rows; ++r) a[r * stride + c] = tmp[r];
    }
}

template <typename T>
std::vector<T> orthogonal_analysis(std::span<const T> x, Shape shape, int levels)
{
    std::vector<T> a(x.begin(), x.end());
    std::vector<T> tmp(std::max(shape.height, shape.width));
    for (int l = 0; l < levels; ++l) {
        const std::size_t rows = shape.height >> l;
        const std::size_t cols = shape.width >> l;
        haar_rows_forward(a, shape.width, rows, cols, tmp);
        haar_cols_forward(a, shape.width, rows, cols, tmp);
    }
    return a;
}

template <typename T>
std::vector<T> orthogonal_synthesis(std::span<const T> beta, Shape shape, int levels)
{
    std::vector<T> a(beta.begin(), beta.end());
    std::vector<T> tmp(std::max(shape.height, shape.width));
    for (int l = levels - 1; l >= 0; --l) {
        const std::size_t rows = shape.height >> l;
        const std::size_t cols = shape.width >> l;
        haar_cols_inverse(a, shape.width, rows, cols, tmp);
        haar_rows_inverse(a, shape.width, rows, cols, tmp);
    }
    return a;
}

// ---- undecimated Haar -------------------------------------------------------
//
// Horizontal filters act along a row: low(a)[c] = (a[c] + a[c+s]) / 2,
// high(a)[c] = (a[c] - a[c+s]) / 2, indices periodic. Their adjoints use
// a[c-s]. low^T low + high^T high = I for every dilation s.

enum class Axis { Horizontal, Vertical };

template <typename T>
void filter(std::span<const T> in, std::span<T> out, Shape shape, std::size_t step, Axis axis, double sign,
            bool adjoint, bool accumulate)
{
    const std::size_t h = shape.height;
    const std::size_t w = shape.width;
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            std::size_t rr = r, cc = c;
            if (axis == Axis::Horizontal) {
                cc = adjoint ? (c + w - step % w) % w : (c + step) % w;
            } else {
                rr = adjoint ? (r + h - step % h) % h : (r + step) % h;
            }
            const T value = 0.5 * (in[r * w + c] + sign * in[rr * w + cc]);
            if (accumulate) out[r * w + c] += value;
            else out[r * w + c] = value;
        }
    }
}

template <typename T>
std::vector<T> undecimated_analysis(std::span<const T> x, Shape shape, int levels)
{
    const std::size_t n = shape.size();
    std::vector<T> coeffs(n * (3 * static_cast<std::size_t>(levels) + 1));
    std::vector<T> approx(x.begin(), x.end());
    std::vector<T> lo(n), hi(n);
    for (int j = 0; j < levels; ++j) {
        const std::size_t step = std::size_t{1} << j;
        filter<T>(approx, lo, shape, step, Axis::Horizontal, +1.0, false, false);
        filter<T>(approx, hi, shape, step, Axis::Horizontal, -1.0, false, false);
        std::span<T> band_h(coeffs.data() + (3 * j + 0) * n, n);
        std::span<T> band_v(coeffs.data() + (3 * j + 1) * n, n);
        std::span<T> band_d(coeffs.data() + (3 * j + 2) * n, n);
        filter<T>(hi, band_h, shape, step, Axis::Vertical, +1.0, false, false);
        filter<T>(lo, band_v, shape, step, Axis::Vertical, -1.0, false, false);
        filter<T>(hi, band_d, shape, step, Axis::Vertical, -1.0, false, false);
        filter<T>(lo, approx, shape, step, Axis::Vertical, +1.0, false, false);
    }
    std::copy(approx.begin(), approx.end(), coeffs.begin() + 3 * static_cast<std::size_t>(levels) * n);
    return coeffs;
}

template <typename T>
std::vector<T> undecimated_synthesis(std::span<const T> beta, Shape shape, int levels)
{
    const std::size_t n = shape.size();
    std::vector<T> approx(beta.begin() + 3 * static_cast<std::size_t>(levels) * n, beta.end());
    std::vector<T> lo(n), hi(n), next(n);
    for (int j = levels - 1; j >= 0; --j) {
        const std::size_t step = std::size_t{1} << j;
        std::span<const T> band_h(beta.data() + (3 * j + 0) * n, n);
        std::span<const T> band_v(beta.data() + (3 * j + 1) * n, n);
        std::span<const T> band_d(beta.data() + (3 * j + 2) * n, n);
        // lo = Lv^T approx + Hv^T band_v ; hi = Lv^T band_h + Hv^T band_d
        filter<T>(approx, lo, shape, step, Axis::Vertical, +1.0, true, false);
        filter<T>(band_v, lo, shape, step, Axis::Vertical, -1.0, true, true);
        filter<T>(band_h, hi, shape, step, Axis::Vertical, +1.0, true, false);
        filter<T>(band_d, hi, shape, step, Axis::Vertical, -1.0, true, true);
        filter<T>(lo, next, shape, step, Axis::Horizontal, +1.0, true, false);
        filter<T>(hi, next, shape, step, Axis::Horizontal, -1.0, true, true);
        approx.swap(next);
    }
    return approx;
}

}  // namespace

std::string to_string(FrameFamily family)
{
    return family == FrameFamily::OrthogonalHaar ? "orthogonal" : "undecimated";
}

FrameFamily parse_frame_family(const std::string& name)
{
    if (name == "orthogonal" || name == "orthogonal-haar") return FrameFamily::OrthogonalHaar;
    if (name == "undecimated" || name == "redundant" || name == "undecimated-haar") return FrameFamily::UndecimatedHaar;
    throw DomainError("unknown frame family '" + name + "'");
}

Frame::Frame(FrameFamily family, int levels, Shape image_shape)
    : family_(family), levels_(levels), shape_(image_shape)
{
    if (levels < 1) throw DomainError("frame needs at least one decomposition level");
    if (image_shape.size() == 0) throw DomainError("frame image shape must be non-empty");
    if (family == FrameFamily::OrthogonalHaar) {
        const std::size_t block = std::size_t{1} << levels;
        if (image_shape.height % block != 0 || image_shape.width % block != 0) {
            throw DomainError("orthogonal Haar with " + std::to_string(levels) +
                              " levels requires image sides divisible by " + std::to_string(block));
        }
    }
}

std::size_t Frame::coefficient_size() const
{
    if (family_ == FrameFamily::OrthogonalHaar) return shape_.size();
    return shape_.size() * (3 * static_cast<std::size_t>(levels_) + 1);
}

void Frame::check_image(std::size_t len) const
{
    if (len != shape_.size()) throw DomainError("frame analysis: image length does not match frame shape");
}

void Frame::check_coefficients(std::size_t len) const
{
    if (len != coefficient_size()) throw DomainError("frame synthesis: coefficient length does not match frame");
}

CVec Frame::analysis(std::span<const cplx> x) const
{
    check_image(x.size());
    return family_ == FrameFamily::OrthogonalHaar ? orthogonal_analysis<cplx>(x, shape_, levels_)
                                                  : undecimated_analysis<cplx>(x, shape_, levels_);
}

CVec Frame::synthesis(std::span<const cplx> beta) const
{
    check_coefficients(beta.size());
    return family_ == FrameFamily::OrthogonalHaar ? orthogonal_synthesis<cplx>(beta, shape_, levels_)
                                                  : undecimated_synthesis<cplx>(beta, shape_, levels_);
}

RVec Frame::analysis(std::span<const double> x) const
{
    check_image(x.size());
    return family_ == FrameFamily::OrthogonalHaar ? orthogonal_analysis<double>(x, shape_, levels_)
                                                  : undecimated_analysis<double>(x, shape_, levels_);
}

RVec Frame::synthesis(std::span<const double> beta) const
{
    check_coefficients(beta.size());
    return family_ == FrameFamily::OrthogonalHaar ? orthogonal_synthesis<double>(beta, shape_, levels_)
                                                  : undecimated_synthesis<double>(beta, shape_, levels_);
}

}  // namespace csalsa
