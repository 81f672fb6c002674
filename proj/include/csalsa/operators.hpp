#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "csalsa/frames.hpp"
#include "csalsa/types.hpp"

namespace csalsa {

enum class OperatorKind { CircularConvolution, PixelMask, PartialFourier, Custom };

std::string to_string(OperatorKind kind);

/// Counts operator applications. Shared between copies of an operator so a
/// harness can audit how many times the solver touched B and B^H.
struct OperatorCallCounter {
    std::uint64_t forward = 0;
    std::uint64_t adjoint = 0;
    std::uint64_t inverse = 0;

    std::uint64_t operator_calls() const { return forward + adjoint; }
    std::uint64_t total() const { return forward + adjoint + inverse; }
};

/// Observation operator A seen by the solver: A = B, or A = B W when a
/// synthesis frame is composed in. B is one of
///   - circular convolution, B = U^H D U (periodic boundaries);
///   - pixel mask, a row selection of the identity (B B^H = I);
///   - partial Fourier, B = M U with M a row selection (M M^H = I);
///   - a custom pair of callables (forward/adjoint only).
///
/// Observations from masks and partial Fourier are ordered by a row-major
/// scan of the mask. Instances are immutable and safe to share across
/// threads, except for the optional call counter.
class LinearOperator {
public:
    using Apply = std::function<CVec(std::span<const cplx>)>;

    /// `kernel` is a small odd-sized (or image-sized) kernel whose centre
    /// sits at index (h/2, w/2). It is normalized to unit sum, zero-padded
    /// to `image_shape` and circularly shifted so its centre lands on the
    /// origin.
    static LinearOperator convolution(const ImageGrid& kernel, Shape image_shape);
    /// Convolution from a kernel already laid out on the full image grid with
    /// its centre at the origin. No normalization is applied.
    static LinearOperator convolution_from_origin_kernel(const ImageGrid& kernel);
    static LinearOperator pixel_mask(const Mask& mask);
    /// `mask` is indexed in DFT order (DC at (0, 0)).
    static LinearOperator partial_fourier(const Mask& mask);
    /// Operator given only through forward and adjoint callables. It has no
    /// closed-form shifted normal inverse.
    static LinearOperator custom(std::size_t domain_size, std::size_t range_size, Apply forward, Apply adjoint,
                                 bool range_is_real = false);

    /// Returns a copy whose domain is frame coefficients (A = B W).
    LinearOperator composed_with(const Frame& frame) const;
    /// Returns a copy that increments `counter` on every application.
    LinearOperator with_counter(std::shared_ptr<OperatorCallCounter> counter) const;

    OperatorKind kind() const { return kind_; }
    const Shape& image_shape() const { return shape_; }
    const std::optional<Frame>& frame() const { return frame_; }
    bool is_synthesis() const { return frame_.has_value(); }
    std::size_t domain_size() const;
    std::size_t range_size() const;
    /// True when the operator maps real inputs to real observations.
    bool range_is_real() const;

    /// Diagonal D of B = U^H D U (convolution only).
    const CVec& frequency_response() const;
    const Mask& mask() const;

    /// A x. Throws DomainError on length mismatch.
    CVec forward(std::span<const cplx> x) const;
    /// A^H r. Throws DomainError on length mismatch.
    CVec adjoint(std::span<const cplx> r) const;
    /// (I + A^H A)^{-1} r through the family's closed form. Throws
    /// CapabilityError when no closed form exists.
    CVec shifted_normal_inverse(std::span<const cplx> r) const;

    /// B and B^H alone, ignoring any frame composition. Not counted.
    CVec forward_image(std::span<const cplx> x) const;
    CVec adjoint_image(std::span<const cplx> r) const;

private:
    LinearOperator() = default;

    CVec mask_scatter(std::span<const cplx> r) const;
    CVec mask_gather(std::span<const cplx> x) const;
    CVec analysis_inverse(std::span<const cplx> r) const;
    /// x - 1/2 (B^H B) x for selection-type B (mask / partial Fourier).
    CVec selection_half_projection(std::span<const cplx> x) const;
    /// F x with F = B^H (B B^H + I)^{-1} B (convolution).
    CVec convolution_smw_filter(std::span<const cplx> x) const;

    OperatorKind kind_ = OperatorKind::Custom;
    Shape shape_;
    std::size_t custom_domain_ = 0;
    std::size_t range_ = 0;
    bool custom_real_ = false;
    CVec response_;
    Mask mask_;
    std::vector<std::size_t> selected_;
    Apply custom_forward_;
    Apply custom_adjoint_;
    std::optional<Frame> frame_;
    std::shared_ptr<OperatorCallCounter> counter_;
};

/// Adds i.i.d. Gaussian noise with standard deviation sigma. In complex
/// mode the variance is split equally between real and imaginary parts
/// (circular complex noise); in real mode only real parts are perturbed.
/// Deterministic given the seed.
Observation add_noise(const Observation& y, double sigma, std::uint64_t seed, bool complex);

}  // namespace csalsa
