#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "csalsa/errors.hpp"

namespace csalsa {

using cplx = std::complex<double>;

/// Flat complex vector. Image-domain iterates, frame coefficients and
/// observations all live in this representation inside the solver; real
/// problems simply carry zero imaginary parts.
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

/// Observation vector y (length m). Real for deblurring and inpainting,
/// complex for partial Fourier.
using Observation = CVec;

struct Shape {
    std::size_t height = 0;
    std::size_t width = 0;

    std::size_t size() const { return height * width; }
    bool operator==(const Shape&) const = default;
};

/// Row-major 2D grid. Index (r, c) maps to r * width + c, the lexicographic
/// stacking used throughout.
template <typename T>
class Grid {
public:
    Grid() = default;

    explicit Grid(Shape shape, T fill = T{})
        : shape_(shape), values_(shape.size(), fill)
    {
        if (shape.size() == 0) {
            throw DomainError("grid must have at least one pixel");
        }
    }

    Grid(Shape shape, std::vector<T> values)
        : shape_(shape), values_(std::move(values))
    {
        if (shape.size() == 0) {
            throw DomainError("grid must have at least one pixel");
        }
        if (values_.size() != shape.size()) {
            throw DomainError("grid value count does not match shape");
        }
        if constexpr (std::is_floating_point_v<T>) {
            for (const T& v : values_) {
                if (!std::isfinite(v)) throw DomainError("grid contains non-finite values");
            }
        } else if constexpr (std::is_same_v<T, cplx>) {
            for (const T& v : values_) {
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                    throw DomainError("grid contains non-finite values");
                }
            }
        }
    }

    const Shape& shape() const { return shape_; }
    std::size_t height() const { return shape_.height; }
    std::size_t width() const { return shape_.width; }
    std::size_t size() const { return values_.size(); }

    T& operator()(std::size_t r, std::size_t c) { return values_[r * shape_.width + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return values_[r * shape_.width + c]; }
    T& operator[](std::size_t i) { return values_[i]; }
    const T& operator[](std::size_t i) const { return values_[i]; }

    std::vector<T>& values() { return values_; }
    const std::vector<T>& values() const { return values_; }

    bool operator==(const Grid&) const = default;

private:
    Shape shape_;
    std::vector<T> values_;
};

using ImageGrid = Grid<double>;
using ComplexGrid = Grid<cplx>;
/// Boolean grid (pixel or frequency mask). uint8_t rather than bool so the
/// storage is addressable.
using Mask = Grid<std::uint8_t>;

std::size_t count_true(const Mask& mask);

CVec to_complex(std::span<const double> x);
RVec real_part(std::span<const cplx> x);
double max_abs_imag(std::span<const cplx> x);

double norm2(std::span<const cplx> x);
double norm2(std::span<const double> x);
double squared_norm(std::span<const cplx> x);
/// Hermitian inner product sum conj(a_i) b_i.
cplx inner(std::span<const cplx> a, std::span<const cplx> b);
bool all_finite(std::span<const cplx> x);

/// out = a - b
CVec subtract(std::span<const cplx> a, std::span<const cplx> b);
/// out = a + b
CVec add(std::span<const cplx> a, std::span<const cplx> b);

}  // namespace csalsa
