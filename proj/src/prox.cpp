#include "csalsa/prox.hpp"

#include <algorithm>

namespace csalsa {
namespace {

void gradient(std::span<const cplx> u, Shape shape, CVec& gx, CVec& gy)
{
    const std::size_t H = shape.height, W = shape.width;
    for (std::size_t i = 0; i < H; ++i) {
        for (std::size_t j = 0; j < W; ++j) {
            const std::size_t k = i * W + j;
            gx[k] = j + 1 < W ? u[k + 1] - u[k] : cplx{};
            gy[k] = i + 1 < H ? u[k + W] - u[k] : cplx{};
        }
    }
}

// Negative adjoint of gradient().
void divergence(const CVec& px, const CVec& py, Shape shape, CVec& out)
{
    const std::size_t H = shape.height, W = shape.width;
    for (std::size_t i = 0; i < H; ++i) {
        for (std::size_t j = 0; j < W; ++j) {
            const std::size_t k = i * W + j;
            cplx d{};
            if (j + 1 < W) d += px[k];
            if (j > 0) d -= px[k - 1];
            if (i + 1 < H) d += py[k];
            if (i > 0) d -= py[k - W];
            out[k] = d;
        }
    }
}

void require_shape(std::size_t len, const std::optional<Shape>& shape)
{
    if (!shape) throw DomainError("TV needs the image shape");
    if (shape->size() != len) throw DomainError("TV: vector length does not match image shape");
}

}  // namespace

Regularizer Regularizer::l1()
{
    return Regularizer{};
}

Regularizer Regularizer::isotropic_tv(TvSettings settings)
{
    if (settings.inner_iterations < 0) throw DomainError("TV prox needs a non-negative iteration count");
    if (!(settings.dual_step > 0.0)) throw DomainError("TV prox dual step must be positive");
    Regularizer r;
    r.kind_ = Kind::IsotropicTV;
    r.tv_ = settings;
    return r;
}

std::string Regularizer::name() const
{
    return kind_ == Kind::L1 ? "l1" : "tv";
}

double Regularizer::evaluate(std::span<const cplx> x, std::optional<Shape> shape) const
{
    if (kind_ == Kind::L1) return l1_norm(x);
    require_shape(x.size(), shape);
    return tv_norm(x, *shape);
}

CVec Regularizer::prox(std::span<const cplx> v, double tau, std::optional<Shape> shape, TvDualField* dual) const
{
    if (kind_ == Kind::L1) return soft_threshold(v, tau);
    require_shape(v.size(), shape);
    return tv_prox(v, *shape, tau, tv_, tv_.warm_start ? dual : nullptr);
}

RVec soft_threshold(std::span<const double> v, double tau)
{
    if (!(tau >= 0.0)) throw DomainError("soft threshold needs tau >= 0");
    RVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v[i]) - tau;
        out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
    }
    return out;
}

CVec soft_threshold(std::span<const cplx> v, double tau)
{
    if (!(tau >= 0.0)) throw DomainError("soft threshold needs tau >= 0");
    CVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i].imag() == 0.0) {
            const double mag = std::abs(v[i].real()) - tau;
            out[i] = mag > 0.0 ? std::copysign(mag, v[i].real()) : 0.0;
            continue;
        }
        const double a = std::abs(v[i]);
        out[i] = a > tau ? v[i] * ((a - tau) / a) : cplx{};
    }
    return out;
}

double l1_norm(std::span<const cplx> x)
{
    double s = 0.0;
    for (const cplx& v : x) s += std::abs(v);
    return s;
}

double tv_norm(std::span<const cplx> x, Shape shape)
{
    if (x.size() != shape.size()) throw DomainError("tv_norm: length does not match shape");
    CVec gx(x.size()), gy(x.size());
    gradient(x, shape, gx, gy);
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += std::sqrt(std::norm(gx[k]) + std::norm(gy[k]));
    return s;
}

double tv_norm(const ImageGrid& x)
{
    return tv_norm(to_complex(x.values()), x.shape());
}

CVec tv_prox(std::span<const cplx> v, Shape shape, double tau, const TvSettings& settings, TvDualField* dual)
{
    if (v.size() != shape.size()) throw DomainError("tv_prox: length does not match shape");
    if (!(tau >= 0.0)) throw DomainError("tv_prox needs tau >= 0");
    if (tau == 0.0) return CVec(v.begin(), v.end());

    const std::size_t n = v.size();
    CVec px(n), py(n);
    if (dual && dual->px.size() == n && dual->py.size() == n) {
        px = dual->px;
        py = dual->py;
    }
    CVec div(n), gx(n), gy(n), arg(n);
    const double step = settings.dual_step;
    for (int it = 0; it < settings.inner_iterations; ++it) {
        divergence(px, py, shape, div);
        for (std::size_t k = 0; k < n; ++k) arg[k] = div[k] - v[k] / tau;
        gradient(arg, shape, gx, gy);
        for (std::size_t k = 0; k < n; ++k) {
            const double mag = std::sqrt(std::norm(gx[k]) + std::norm(gy[k]));
            const double denom = 1.0 + step * mag;
            px[k] = (px[k] + step * gx[k]) / denom;
            py[k] = (py[k] + step * gy[k]) / denom;
        }
    }
    divergence(px, py, shape, div);
    CVec out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = v[k] - tau * div[k];
    if (dual) {
        dual->px = std::move(px);
        dual->py = std::move(py);
    }
    return out;
}

ImageGrid tv_prox(const ImageGrid& v, double tau, const TvSettings& settings)
{
    const CVec out = tv_prox(to_complex(v.values()), v.shape(), tau, settings);
    return ImageGrid(v.shape(), real_part(out));
}

Observation project_ball(std::span<const cplx> s, const BallConstraint& ball)
{
    if (s.size() != ball.center.size()) throw DomainError("project_ball: length does not match ball centre");
    if (!(ball.radius >= 0.0)) throw DomainError("project_ball: negative radius");
    Observation out(s.begin(), s.end());
    double dist2 = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) dist2 += std::norm(s[i] - ball.center[i]);
    const double dist = std::sqrt(dist2);
    // Points already on the sphere up to rounding are left untouched, which
    // makes the projection exactly idempotent.
    if (dist <= ball.radius * (1.0 + 1e-12)) return out;
    const double scale = ball.radius / dist;
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = ball.center[i] + scale * (s[i] - ball.center[i]);
    return out;
}

}  // namespace csalsa
