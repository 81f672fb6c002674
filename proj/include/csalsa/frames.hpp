#pragma once

#include <span>
#include <string>

#include "csalsa/types.hpp"

namespace csalsa {

enum class FrameFamily { OrthogonalHaar, UndecimatedHaar };

std::string to_string(FrameFamily family);
FrameFamily parse_frame_family(const std::string& name);

/// Parseval frame built from Haar filters with periodic boundary extension.
///
/// synthesis() is W (coefficients -> image, n x d), analysis() is
/// P = W^H (image -> coefficients). Both families satisfy W W^H = I, so
/// synthesis(analysis(x)) == x. For OrthogonalHaar d = n and the transform is
/// an orthonormal basis. For UndecimatedHaar d = n (3L + 1): each level
/// contributes three detail subbands and the last level's lowpass band is
/// kept; filters are (1/2)(1, +-1) at dilation 2^(j-1) so that the squared
/// frequency responses of every 2D level sum to one.
///
/// Coefficient layout:
///   OrthogonalHaar: in-place Mallat layout on an h x w grid (coarsest
///     approximation in the top-left corner).
///   UndecimatedHaar: [LH_1, HL_1, HH_1, ..., LH_L, HL_L, HH_L, LL_L], each
///     block a full h x w grid.
class Frame {
public:
    Frame(FrameFamily family, int levels, Shape image_shape);

    FrameFamily family() const { return family_; }
    int levels() const { return levels_; }
    const Shape& image_shape() const { return shape_; }
    std::size_t image_size() const { return shape_.size(); }
    std::size_t coefficient_size() const;

    /// W^H x
    CVec analysis(std::span<const cplx> x) const;
    /// W beta
    CVec synthesis(std::span<const cplx> beta) const;

    RVec analysis(std::span<const double> x) const;
    RVec synthesis(std::span<const double> beta) const;

    bool operator==(const Frame&) const = default;

private:
    void check_image(std::size_t len) const;
    void check_coefficients(std::size_t len) const;

    FrameFamily family_;
    int levels_;
    Shape shape_;
};

}  // namespace csalsa
