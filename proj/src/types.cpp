#include "csalsa/types.hpp"

#include <algorithm>

namespace csalsa {

std::size_t count_true(const Mask& mask)
{
    return static_cast<std::size_t>(
        std::count_if(mask.values().begin(), mask.values().end(), [](std::uint8_t v) { return v != 0; }));
}

CVec to_complex(std::span<const double> x)
{
    return CVec(x.begin(), x.end());
}

RVec real_part(std::span<const cplx> x)
{
    RVec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i].real();
    return out;
}

double max_abs_imag(std::span<const cplx> x)
{
    double m = 0.0;
    for (const cplx& v : x) m = std::max(m, std::abs(v.imag()));
    return m;
}

double squared_norm(std::span<const cplx> x)
{
    double s = 0.0;
    for (const cplx& v : x) s += std::norm(v);
    return s;
}

double norm2(std::span<const cplx> x)
{
    return std::sqrt(squared_norm(x));
}

double norm2(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b)
{
    if (a.size() != b.size()) throw DomainError("inner product of vectors with different lengths");
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

bool all_finite(std::span<const cplx> x)
{
    return std::all_of(x.begin(), x.end(),
                       [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

CVec subtract(std::span<const cplx> a, std::span<const cplx> b)
{
    if (a.size() != b.size()) throw DomainError("vector length mismatch");
    CVec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

CVec add(std::span<const cplx> a, std::span<const cplx> b)
{
    if (a.size() != b.size()) throw DomainError("vector length mismatch");
    CVec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

}  // namespace csalsa
