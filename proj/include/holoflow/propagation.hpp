#pragma once

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "grid.hpp"

namespace holoflow {

namespace detail {

// Plans are cached per (rows, cols, sign). Creation is serialized (FFTW plan
// creation is not thread-safe); fftw_execute_dft on distinct buffers is.
// FFTW_UNALIGNED lets one plan run on any std::vector storage.
class FftPlanCache {
public:
    static FftPlanCache& instance() {
        static FftPlanCache cache;
        return cache;
    }

    void execute(const GridShape& shape, int sign, const cplx* in, cplx* out) {
        fftw_plan plan = get(shape, sign);
        fftw_execute_dft(plan,
                         reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }

private:
    FftPlanCache() = default;
    ~FftPlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }
    FftPlanCache(const FftPlanCache&) = delete;
    FftPlanCache& operator=(const FftPlanCache&) = delete;

    fftw_plan get(const GridShape& shape, int sign) {
        const std::tuple<std::size_t, std::size_t, int> key{shape.is_2d() ? shape.rows() : 0,
                                                            shape.cols(), sign};
        std::lock_guard lock(mutex_);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        std::vector<cplx> scratch_in(shape.total()), scratch_out(shape.total());
        auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
        auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan plan = shape.is_2d()
                             ? fftw_plan_dft_2d(static_cast<int>(shape.rows()),
                                                static_cast<int>(shape.cols()), in, out, sign, flags)
                             : fftw_plan_dft_1d(static_cast<int>(shape.cols()), in, out, sign, flags);
        if (!plan) throw numeric_error("fftw failed to build a plan for shape " + shape.str());
        plans_.emplace(key, plan);
        return plan;
    }

    std::mutex mutex_;
    std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

}  // namespace detail

/// Far-field propagation: the unnormalized forward transform with kernel
/// w_mn = exp(-j 2 pi <m,n> / extent) applied per dimension. O(N log N).
inline ComplexGrid propagate(const ComplexGrid& h) {
    ComplexGrid p(h.shape);
    detail::FftPlanCache::instance().execute(h.shape, FFTW_FORWARD, h.data.data(), p.data.data());
    return p;
}

/// Conjugate transpose of propagate: t_n = sum_m conj(w_mn) g_m, equal to
/// N times the inverse transform. adjoint_propagate(propagate(x)) == N * x.
inline ComplexGrid adjoint_propagate(const ComplexGrid& g) {
    ComplexGrid t(g.shape);
    detail::FftPlanCache::instance().execute(g.shape, FFTW_BACKWARD, g.data.data(), t.data.data());
    return t;
}

/// Phase-only projection c_n / |c_n|. Every input entry must have nonzero
/// amplitude; the offending index is named otherwise.
inline ComplexGrid project_phase_only(const ComplexGrid& c) {
    ComplexGrid h(c.shape);
    for (std::size_t n = 0; n < c.size(); ++n) {
        const double amp = std::abs(c[n]);
        if (amp == 0.0)
            throw numeric_error("zero-amplitude entry " + std::to_string(n) +
                                ": phase-only projection undefined");
        h[n] = c[n] / amp;
    }
    return h;
}

/// Pointwise squared modulus.
inline IntensityGrid intensity(const ComplexGrid& p) {
    IntensityGrid out(p.shape);
    for (std::size_t m = 0; m < p.size(); ++m) out[m] = std::norm(p[m]);
    return out;
}

}  // namespace holoflow
