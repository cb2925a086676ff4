#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <tuple>

namespace qie::detail {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (rank, n, sign) and kept for the
// lifetime of the process.
class FftwPlanCache {
public:
    static FftwPlanCache& instance() {
        static FftwPlanCache cache;
        return cache;
    }

    FftwPlanCache(const FftwPlanCache&) = delete;
    FftwPlanCache& operator=(const FftwPlanCache&) = delete;

    fftw_plan get(int rank, int n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_tuple(rank, n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        int dims[3] = {n, n, n};
        std::size_t total = 1;
        for (int i = 0; i < rank; ++i) total *= static_cast<std::size_t>(n);
        auto* in = fftw_alloc_complex(total);
        auto* out = fftw_alloc_complex(total);
        fftw_plan plan = fftw_plan_dft(rank, dims, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        plans_.emplace(key, plan);
        return plan;
    }

    ~FftwPlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    FftwPlanCache() = default;

    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

/// Unnormalized DFT over an n^rank row-major array, out-of-place.
inline void dft(int rank, int n, int sign, const std::complex<double>* in, std::complex<double>* out) {
    fftw_plan plan = FftwPlanCache::instance().get(rank, n, sign);
    // fftw_execute_dft takes non-const input; c2c out-of-place leaves it untouched.
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

} // namespace qie::detail
