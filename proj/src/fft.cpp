#include "csalsa/fft.hpp"

#include <fftw3.h>

#include <atomic>
#include <map>
#include <mutex>
#include <tuple>
#include <utility>

namespace csalsa::fft {
namespace {

std::atomic<double> g_fault_factor{1.0};

// FFTW's planner is not thread-safe; execution of an existing plan on new
// arrays (fftw_execute_dft) is.
class PlanCache {
public:
    ~PlanCache()
    {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(Shape shape, int sign)
    {
        std::lock_guard lock(mutex_);
        const auto key = std::make_tuple(shape.height, shape.width, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        const std::size_t n = shape.size();
        auto* in = fftw_alloc_complex(n);
        auto* out = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(shape.height), static_cast<int>(shape.width), in, out,
                                          sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache()
{
    static PlanCache instance;
    return instance;
}

CVec execute(std::span<const cplx> x, Shape shape, int sign)
{
    if (x.size() != shape.size() || shape.size() == 0) {
        throw DomainError("fft: input length does not match shape");
    }
    CVec in(x.begin(), x.end());
    CVec out(x.size());
    fftw_execute_dft(cache().get(shape, sign), reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

}  // namespace

CVec forward(std::span<const cplx> x, Shape shape)
{
    CVec out = execute(x, shape, FFTW_FORWARD);
    const double scale = g_fault_factor.load() / std::sqrt(static_cast<double>(shape.size()));
    for (cplx& v : out) v *= scale;
    return out;
}

CVec inverse(std::span<const cplx> X, Shape shape)
{
    CVec out = execute(X, shape, FFTW_BACKWARD);
    const double scale = 1.0 / std::sqrt(static_cast<double>(shape.size()));
    for (cplx& v : out) v *= scale;
    return out;
}

CVec forward_unnormalized(std::span<const cplx> x, Shape shape)
{
    return execute(x, shape, FFTW_FORWARD);
}

namespace testing {
void set_normalization_fault(double factor) { g_fault_factor.store(factor); }
double normalization_fault() { return g_fault_factor.load(); }
}  // namespace testing

}  // namespace csalsa::fft
