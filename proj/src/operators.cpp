#include "csalsa/operators.hpp"

#include <random>

#include "csalsa/fft.hpp"

namespace csalsa {
namespace {

void zero_imag_if_real_input(std::span<const cplx> in, CVec& out)
{
    if (max_abs_imag(in) != 0.0) return;
    for (cplx& v : out) v.imag(0.0);
}

}  // namespace

std::string to_string(OperatorKind kind)
{
    switch (kind) {
    case OperatorKind::CircularConvolution: return "convolution";
    case OperatorKind::PixelMask: return "mask";
    case OperatorKind::PartialFourier: return "partial-fourier";
    case OperatorKind::Custom: return "custom";
    }
    return "unknown";
}

LinearOperator LinearOperator::convolution(const ImageGrid& kernel, Shape image_shape)
{
    if (image_shape.size() == 0) throw DomainError("convolution: empty image shape");
    if (kernel.height() > image_shape.height || kernel.width() > image_shape.width) {
        throw DomainError("convolution: kernel larger than image");
    }
    double sum = 0.0;
    for (double v : kernel.values()) sum += v;
    if (sum == 0.0) throw DomainError("convolution: kernel sums to zero and cannot be normalized");

    ImageGrid padded(image_shape, 0.0);
    const auto ch = static_cast<std::ptrdiff_t>(kernel.height() / 2);
    const auto cw = static_cast<std::ptrdiff_t>(kernel.width() / 2);
    const auto H = static_cast<std::ptrdiff_t>(image_shape.height);
    const auto W = static_cast<std::ptrdiff_t>(image_shape.width);
    for (std::size_t i = 0; i < kernel.height(); ++i) {
        for (std::size_t j = 0; j < kernel.width(); ++j) {
            const std::ptrdiff_t r = ((static_cast<std::ptrdiff_t>(i) - ch) % H + H) % H;
            const std::ptrdiff_t c = ((static_cast<std::ptrdiff_t>(j) - cw) % W + W) % W;
            padded(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) += kernel(i, j) / sum;
        }
    }
    return convolution_from_origin_kernel(padded);
}

LinearOperator LinearOperator::convolution_from_origin_kernel(const ImageGrid& kernel)
{
    LinearOperator op;
    op.kind_ = OperatorKind::CircularConvolution;
    op.shape_ = kernel.shape();
    op.range_ = kernel.size();
    op.response_ = fft::forward_unnormalized(to_complex(kernel.values()), kernel.shape());
    return op;
}

LinearOperator LinearOperator::pixel_mask(const Mask& mask)
{
    LinearOperator op;
    op.kind_ = OperatorKind::PixelMask;
    op.shape_ = mask.shape();
    op.mask_ = mask;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) op.selected_.push_back(i);
    }
    if (op.selected_.empty()) throw DomainError("pixel mask selects no pixels");
    op.range_ = op.selected_.size();
    return op;
}

LinearOperator LinearOperator::partial_fourier(const Mask& mask)
{
    LinearOperator op = pixel_mask(mask);
    op.kind_ = OperatorKind::PartialFourier;
    return op;
}

LinearOperator LinearOperator::custom(std::size_t domain_size, std::size_t range_size, Apply forward, Apply adjoint,
                                      bool range_is_real)
{
    if (domain_size == 0 || range_size == 0) throw DomainError("custom operator needs non-empty domain and range");
    if (!forward || !adjoint) throw DomainError("custom operator needs forward and adjoint callables");
    LinearOperator op;
    op.kind_ = OperatorKind::Custom;
    op.custom_domain_ = domain_size;
    op.range_ = range_size;
    op.custom_real_ = range_is_real;
    op.custom_forward_ = std::move(forward);
    op.custom_adjoint_ = std::move(adjoint);
    return op;
}

LinearOperator LinearOperator::composed_with(const Frame& frame) const
{
    if (frame_) throw DomainError("operator already composed with a frame");
    const std::size_t image = kind_ == OperatorKind::Custom ? custom_domain_ : shape_.size();
    if (frame.image_size() != image) throw DomainError("frame image size does not match operator domain");
    if (kind_ != OperatorKind::Custom && !(frame.image_shape() == shape_)) {
        throw DomainError("frame image shape does not match operator shape");
    }
    LinearOperator op = *this;
    op.frame_ = frame;
    return op;
}

LinearOperator LinearOperator::with_counter(std::shared_ptr<OperatorCallCounter> counter) const
{
    LinearOperator op = *this;
    op.counter_ = std::move(counter);
    return op;
}

std::size_t LinearOperator::domain_size() const
{
    if (frame_) return frame_->coefficient_size();
    return kind_ == OperatorKind::Custom ? custom_domain_ : shape_.size();
}

std::size_t LinearOperator::range_size() const { return range_; }

bool LinearOperator::range_is_real() const
{
    switch (kind_) {
    case OperatorKind::CircularConvolution: {
        // Real iff the kernel is real, i.e. D is Hermitian-symmetric.
        const std::size_t H = shape_.height, W = shape_.width;
        for (std::size_t r = 0; r < H; ++r) {
            for (std::size_t c = 0; c < W; ++c) {
                const cplx a = response_[r * W + c];
                const cplx b = response_[((H - r) % H) * W + (W - c) % W];
                if (std::abs(a - std::conj(b)) > 1e-12 * (1.0 + std::abs(a))) return false;
            }
        }
        return true;
    }
    case OperatorKind::PixelMask: return true;
    case OperatorKind::PartialFourier: return false;
    case OperatorKind::Custom: return custom_real_;
    }
    return false;
}

const CVec& LinearOperator::frequency_response() const
{
    if (kind_ != OperatorKind::CircularConvolution) throw DomainError("operator has no frequency response");
    return response_;
}

const Mask& LinearOperator::mask() const
{
    if (kind_ != OperatorKind::PixelMask && kind_ != OperatorKind::PartialFourier) {
        throw DomainError("operator has no mask");
    }
    return mask_;
}

CVec LinearOperator::mask_gather(std::span<const cplx> x) const
{
    CVec out(selected_.size());
    for (std::size_t k = 0; k < selected_.size(); ++k) out[k] = x[selected_[k]];
    return out;
}

CVec LinearOperator::mask_scatter(std::span<const cplx> r) const
{
    CVec out(shape_.size(), cplx{0.0, 0.0});
    for (std::size_t k = 0; k < selected_.size(); ++k) out[selected_[k]] = r[k];
    return out;
}

CVec LinearOperator::forward_image(std::span<const cplx> x) const
{
    switch (kind_) {
    case OperatorKind::CircularConvolution: {
        if (x.size() != shape_.size()) throw DomainError("convolution: input length mismatch");
        CVec X = fft::forward(x, shape_);
        for (std::size_t i = 0; i < X.size(); ++i) X[i] *= response_[i];
        CVec out = fft::inverse(X, shape_);
        zero_imag_if_real_input(x, out);
        return out;
    }
    case OperatorKind::PixelMask:
        if (x.size() != shape_.size()) throw DomainError("mask: input length mismatch");
        return mask_gather(x);
    case OperatorKind::PartialFourier:
        if (x.size() != shape_.size()) throw DomainError("partial Fourier: input length mismatch");
        return mask_gather(fft::forward(x, shape_));
    case OperatorKind::Custom: {
        if (x.size() != custom_domain_) throw DomainError("custom operator: input length mismatch");
        CVec out = custom_forward_(x);
        if (out.size() != range_) throw DomainError("custom operator: forward returned wrong length");
        return out;
    }
    }
    throw DomainError("unknown operator kind");
}

CVec LinearOperator::adjoint_image(std::span<const cplx> r) const
{
    if (r.size() != range_) throw DomainError("adjoint: observation length mismatch");
    switch (kind_) {
    case OperatorKind::CircularConvolution: {
        CVec R = fft::forward(r, shape_);
        for (std::size_t i = 0; i < R.size(); ++i) R[i] *= std::conj(response_[i]);
        CVec out = fft::inverse(R, shape_);
        zero_imag_if_real_input(r, out);
        return out;
    }
    case OperatorKind::PixelMask: return mask_scatter(r);
    case OperatorKind::PartialFourier: return fft::inverse(mask_scatter(r), shape_);
    case OperatorKind::Custom: {
        CVec out = custom_adjoint_(r);
        if (out.size() != custom_domain_) throw DomainError("custom operator: adjoint returned wrong length");
        return out;
    }
    }
    throw DomainError("unknown operator kind");
}

CVec LinearOperator::forward(std::span<const cplx> x) const
{
    if (x.size() != domain_size()) throw DomainError("forward: input length does not match operator domain");
    if (counter_) ++counter_->forward;
    if (frame_) return forward_image(frame_->synthesis(x));
    return forward_image(x);
}

CVec LinearOperator::adjoint(std::span<const cplx> r) const
{
    if (r.size() != range_) throw DomainError("adjoint: observation length does not match operator range");
    if (counter_) ++counter_->adjoint;
    if (frame_) return frame_->analysis(adjoint_image(r));
    return adjoint_image(r);
}

CVec LinearOperator::analysis_inverse(std::span<const cplx> r) const
{
    switch (kind_) {
    case OperatorKind::CircularConvolution: {
        // U^H (|D|^2 + I)^{-1} U r
        CVec R = fft::forward(r, shape_);
        for (std::size_t i = 0; i < R.size(); ++i) R[i] /= (std::norm(response_[i]) + 1.0);
        CVec out = fft::inverse(R, shape_);
        zero_imag_if_real_input(r, out);
        return out;
    }
    case OperatorKind::PixelMask: {
        // I - 1/2 B^H B: halve observed pixels.
        CVec out(r.begin(), r.end());
        for (std::size_t idx : selected_) out[idx] *= 0.5;
        return out;
    }
    case OperatorKind::PartialFourier: return selection_half_projection(r);
    case OperatorKind::Custom: break;
    }
    throw CapabilityError("no closed-form (I + A^H A)^{-1} for operator kind '" + to_string(kind_) + "'");
}

CVec LinearOperator::selection_half_projection(std::span<const cplx> x) const
{
    // x - 1/2 B^H B x, using B B^H = I for row selections.
    CVec bhb = kind_ == OperatorKind::PixelMask ? mask_scatter(mask_gather(x))
                                                : fft::inverse(mask_scatter(mask_gather(fft::forward(x, shape_))), shape_);
    CVec out(x.begin(), x.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= 0.5 * bhb[i];
    return out;
}

CVec LinearOperator::convolution_smw_filter(std::span<const cplx> x) const
{
    // F = U^H D^* (|D|^2 + I)^{-1} D U
    CVec X = fft::forward(x, shape_);
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double d2 = std::norm(response_[i]);
        X[i] *= d2 / (d2 + 1.0);
    }
    CVec out = fft::inverse(X, shape_);
    zero_imag_if_real_input(x, out);
    return out;
}

CVec LinearOperator::shifted_normal_inverse(std::span<const cplx> r) const
{
    if (r.size() != domain_size()) throw DomainError("shifted normal inverse: input length mismatch");
    if (!all_finite(r)) throw DomainError("shifted normal inverse: non-finite input");
    if (kind_ == OperatorKind::Custom) {
        throw CapabilityError("no closed-form (I + A^H A)^{-1} for a custom operator");
    }
    if (counter_) ++counter_->inverse;
    if (!frame_) return analysis_inverse(r);

    // Synthesis forms, valid because W W^H = I:
    //   convolution: I - W^H F W
    //   selections:  I - 1/2 W^H B^H B W
    const CVec image = frame_->synthesis(r);
    CVec filtered;
    if (kind_ == OperatorKind::CircularConvolution) {
        filtered = convolution_smw_filter(image);
    } else {
        filtered = subtract(image, selection_half_projection(image));
    }
    const CVec back = frame_->analysis(filtered);
    return subtract(r, back);
}

Observation add_noise(const Observation& y, double sigma, std::uint64_t seed, bool complex)
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("noise standard deviation must be >= 0");
    Observation out = y;
    if (sigma == 0.0) return out;
    std::mt19937_64 rng(seed);
    if (complex) {
        std::normal_distribution<double> dist(0.0, sigma / std::sqrt(2.0));
        for (cplx& v : out) {
            const double re = dist(rng);
            const double im = dist(rng);
            v += cplx{re, im};
        }
    } else {
        std::normal_distribution<double> dist(0.0, sigma);
        for (cplx& v : out) v += dist(rng);
    }
    return out;
}

}  // namespace csalsa
