#pragma once

#include <random>

#include "csalsa/types.hpp"

namespace csalsa::test {

inline CVec random_complex(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    CVec x(n);
    for (auto& v : x) v = {g(rng), g(rng)};
    return x;
}

inline RVec random_real(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    RVec x(n);
    for (auto& v : x) v = g(rng);
    return x;
}

inline double rel_err(std::span<const cplx> a, std::span<const cplx> b)
{
    const double nb = norm2(b);
    const CVec d = subtract(a, b);
    return nb > 0.0 ? norm2(d) / nb : norm2(d);
}

}  // namespace csalsa::test
