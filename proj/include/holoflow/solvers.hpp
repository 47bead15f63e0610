#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>

#include "config.hpp"
#include "gradients.hpp"
#include "grid.hpp"
#include "metrics.hpp"
#include "propagation.hpp"
#include "random.hpp"

namespace holoflow {

/// Sampled parameter/gradient snapshots at chosen linear indices, one row per
/// logged iteration. Feeds the theorem checkers and the trajectory plots.
struct Trajectory {
    Algorithm algorithm = Algorithm::wfcf;
    GridShape shape;
    double learning_rate = 0.0;
    LossNorm gradient_norm = LossNorm::raw;
    std::vector<std::size_t> indices;
    std::vector<std::size_t> iters;
    std::vector<std::vector<cplx>> params;     // params[k][i]: c at iters[k], indices[i]
    std::vector<std::vector<cplx>> gradients;  // matching gradient snapshots
};

struct SolveResult {
    std::optional<ComplexGrid> cartesian_params;  // wfcf / kaczmarz final parameters
    std::optional<PhaseGrid> phase_params;        // wfpf variants
    ComplexGrid final_hologram;                   // unit amplitude
    IntensityGrid displayed;
    std::vector<IterationRecord> log;
    std::optional<Trajectory> trajectory;
};

/// First/second moment state of the Adam optimizer over a real grid.
struct AdamState {
    RealGrid m;
    RealGrid v;
    std::uint64_t t = 0;

    explicit AdamState(const GridShape& shape) : m(shape), v(shape) {}
};

/// One canonical bias-corrected Adam step. Returns the update grid; the
/// caller subtracts it from the parameters.
inline RealGrid adam_step(AdamState& state, const RealGrid& grad, double lr,
                          const AdamParams& params) {
    require_same_shape(state.m.shape, grad.shape, "adam_step");
    params.validate();
    state.t += 1;
    const double bc1 = 1.0 - std::pow(params.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(params.beta2, static_cast<double>(state.t));
    RealGrid update(grad.shape);
    for (std::size_t n = 0; n < grad.size(); ++n) {
        state.m[n] = params.beta1 * state.m[n] + (1.0 - params.beta1) * grad[n];
        state.v[n] = params.beta2 * state.v[n] + (1.0 - params.beta2) * grad[n] * grad[n];
        const double mhat = state.m[n] / bc1;
        const double vhat = state.v[n] / bc2;
        update[n] = lr * mhat / (std::sqrt(vhat) + params.epsilon);
    }
    return update;
}

namespace detail {

inline constexpr double quiet_nan = std::numeric_limits<double>::quiet_NaN();

class RunClock {
public:
    RunClock() : start_(std::chrono::steady_clock::now()) {}
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

struct TrajectoryRecorder {
    explicit TrajectoryRecorder(const SolverConfig& cfg, const GridShape& shape, LossNorm norm) {
        if (!cfg.snapshot_indices) return;
        traj.emplace();
        traj->algorithm = cfg.algorithm;
        traj->shape = shape;
        traj->learning_rate = cfg.learning_rate;
        traj->gradient_norm = norm;
        traj->indices = *cfg.snapshot_indices;
        for (std::size_t idx : traj->indices)
            if (idx >= shape.total())
                throw config_error("snapshot index " + std::to_string(idx) + " out of range");
    }

    void record(std::size_t iter, const ComplexGrid& params, const ComplexGrid& grads) {
        if (!traj) return;
        traj->iters.push_back(iter);
        std::vector<cplx> ps, gs;
        ps.reserve(traj->indices.size());
        gs.reserve(traj->indices.size());
        for (std::size_t idx : traj->indices) {
            ps.push_back(params[idx]);
            gs.push_back(grads[idx]);
        }
        traj->params.push_back(std::move(ps));
        traj->gradients.push_back(std::move(gs));
    }

    std::optional<Trajectory> traj;
};

inline void require_finite_loss(double value, const char* algo, std::size_t iter) {
    if (!std::isfinite(value))
        throw numeric_error(std::string(algo) + " diverged: non-finite loss at iteration " +
                            std::to_string(iter));
}

inline bool should_log(std::size_t iter, std::size_t stride) { return iter % stride == 0; }

}  // namespace detail

/// All linear indices of a shape, for full-grid trajectory tracking.
inline std::vector<std::size_t> all_indices(const GridShape& shape) {
    std::vector<std::size_t> idx(shape.total());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return idx;
}

/// Gradient descent on the Cartesian parameters: c <- c - lr * gradient.
/// Starts from a complex Gaussian draw (or `c0` when given), never touches
/// the amplitude floor afterwards (each step is tangential, so amplitudes are
/// non-decreasing), and returns the phase-only projection of the final
/// parameters.
inline SolveResult run_wfcf(const IntensityGrid& target, const SolverConfig& cfg,
                            const ComplexGrid* c0 = nullptr) {
    cfg.validate();
    if (cfg.algorithm != Algorithm::wfcf) throw config_error("run_wfcf: algorithm mismatch");
    const LossNorm norm = cfg.normalize_loss ? LossNorm::normalized : LossNorm::raw;

    ComplexGrid c = c0 ? *c0 : init_cartesian(target.shape, cfg.seed, cfg.init_variance);
    require_same_shape(c.shape, target.shape, "run_wfcf");

    detail::RunClock clock;
    detail::TrajectoryRecorder recorder(cfg, target.shape, norm);
    SolveResult result;
    for (std::size_t tau = 0; tau < cfg.iterations; ++tau) {
        WfcfEval eval = wfcf_evaluate(c, target, norm);
        detail::require_finite_loss(eval.loss, "wfcf", tau);
        if (detail::should_log(tau, cfg.log_stride)) {
            double max_grad = 0.0;
            for (const cplx& g : eval.gradient.data) max_grad = std::max(max_grad, std::abs(g));
            result.log.push_back({tau, eval.loss, psnr(eval.displayed, target), min_amplitude(c),
                                  max_grad, clock.elapsed_ms()});
            recorder.record(tau, c, eval.gradient);
        }
        for (std::size_t n = 0; n < c.size(); ++n)
            c[n] -= cfg.learning_rate * eval.gradient[n];
    }

    result.final_hologram = project_phase_only(c);
    result.displayed = intensity(propagate(result.final_hologram));
    result.cartesian_params = std::move(c);
    result.trajectory = std::move(recorder.traj);
    return result;
}

/// Gradient descent on the phases, either with a fixed rate or with Adam.
/// phi[0] is the phase pattern of the same Gaussian draw a wfcf run with this
/// seed would start from; phases are wrapped to [0, 2*pi) every iteration
/// (the hologram exp(j*phi) is unchanged by wrapping).
inline SolveResult run_wfpf(const IntensityGrid& target, const SolverConfig& cfg,
                            const PhaseGrid* phi0 = nullptr) {
    cfg.validate();
    if (cfg.algorithm != Algorithm::wfpf && cfg.algorithm != Algorithm::wfpf_adam)
        throw config_error("run_wfpf: algorithm mismatch");
    const bool use_adam = cfg.algorithm == Algorithm::wfpf_adam;
    const LossNorm norm = cfg.normalize_loss ? LossNorm::normalized : LossNorm::raw;

    PhaseGrid phi = phi0 ? *phi0 : init_phase_from(init_cartesian(target.shape, cfg.seed, cfg.init_variance));
    require_same_shape(phi.shape, target.shape, "run_wfpf");

    detail::RunClock clock;
    detail::TrajectoryRecorder recorder(cfg, target.shape, norm);
    AdamState adam(target.shape);
    SolveResult result;
    for (std::size_t tau = 0; tau < cfg.iterations; ++tau) {
        WfpfEval eval = wfpf_evaluate(phi, target, norm);
        detail::require_finite_loss(eval.loss, use_adam ? "wfpf-adam" : "wfpf", tau);
        if (detail::should_log(tau, cfg.log_stride)) {
            double max_grad = 0.0;
            for (double g : eval.gradient.data) max_grad = std::max(max_grad, std::abs(g));
            result.log.push_back({tau, eval.loss, psnr(eval.displayed, target), detail::quiet_nan,
                                  max_grad, clock.elapsed_ms()});
            if (recorder.traj) {
                ComplexGrid h(phi.shape), g(phi.shape);
                for (std::size_t n = 0; n < phi.size(); ++n) {
                    h[n] = std::polar(1.0, phi[n]);
                    g[n] = cplx(eval.gradient[n], 0.0);
                }
                recorder.record(tau, h, g);
            }
        }
        if (use_adam) {
            const RealGrid update = adam_step(adam, eval.gradient, cfg.learning_rate, cfg.adam);
            for (std::size_t n = 0; n < phi.size(); ++n) phi.set(n, phi[n] - update[n]);
        } else {
            for (std::size_t n = 0; n < phi.size(); ++n)
                phi.set(n, phi[n] - cfg.learning_rate * eval.gradient[n]);
        }
    }

    ComplexGrid h(phi.shape);
    for (std::size_t n = 0; n < phi.size(); ++n) h[n] = std::polar(1.0, phi[n]);
    result.final_hologram = std::move(h);
    result.displayed = intensity(propagate(result.final_hologram));
    result.phase_params = std::move(phi);
    result.trajectory = std::move(recorder.traj);
    return result;
}

/// Alternating projections between the image and hologram constraints.
/// Forward-propagate, impose the target amplitudes (keeping phases), back
/// propagate, renormalize to unit amplitude. Zero magnitudes take phase 0 on
/// the image side and retain the previous hologram value on the hologram
/// side.
inline SolveResult run_gs(const IntensityGrid& target, const SolverConfig& cfg,
                          const ComplexGrid* h0 = nullptr) {
    cfg.validate();
    if (cfg.algorithm != Algorithm::gs) throw config_error("run_gs: algorithm mismatch");
    const LossNorm norm = cfg.normalize_loss ? LossNorm::normalized : LossNorm::raw;
    const double k = norm_constant(norm, target.size());

    ComplexGrid h = h0 ? project_phase_only(*h0)
                       : project_phase_only(init_cartesian(target.shape, cfg.seed, cfg.init_variance));
    require_same_shape(h.shape, target.shape, "run_gs");

    std::vector<double> amp(target.size());
    for (std::size_t m = 0; m < target.size(); ++m) amp[m] = std::sqrt(target[m]);

    detail::RunClock clock;
    SolveResult result;
    for (std::size_t tau = 0; tau < cfg.iterations; ++tau) {
        const ComplexGrid p = propagate(h);
        double loss_sum = 0.0;
        IntensityGrid displayed = intensity(p);
        for (std::size_t m = 0; m < p.size(); ++m) {
            const double r = displayed[m] - target[m];
            loss_sum += r * r;
        }
        detail::require_finite_loss(k * loss_sum, "gs", tau);
        if (detail::should_log(tau, cfg.log_stride))
            result.log.push_back({tau, k * loss_sum, psnr(displayed, target), detail::quiet_nan,
                                  detail::quiet_nan, clock.elapsed_ms()});

        ComplexGrid q(p.shape);
        for (std::size_t m = 0; m < p.size(); ++m) {
            const double pm = std::abs(p[m]);
            q[m] = pm > 0.0 ? amp[m] * p[m] / pm : cplx(amp[m], 0.0);
        }
        // The back-propagated field is adjoint/N; the 1/N scale cancels in the
        // unit projection, and zero-magnitude entries retain the previous h_n.
        ComplexGrid u = adjoint_propagate(q);
        for (std::size_t n = 0; n < u.size(); ++n) {
            const double un = std::abs(u[n]);
            if (un > 0.0) h[n] = u[n] / un;
        }
    }

    result.displayed = intensity(propagate(h));
    result.final_hologram = std::move(h);
    result.trajectory = std::nullopt;
    return result;
}

namespace detail {

// Per-axis twiddle tables: row m of the forward kernel factors into
// tw_r[(m_r n_r) % R] * tw_c[(m_c n_c) % C], so a row is materialized in O(N)
// without trigonometry.
struct KernelRows {
    explicit KernelRows(const GridShape& shape)
        : rows(shape.is_2d() ? shape.rows() : 1), cols(shape.cols()) {
        tw_r = twiddles(rows);
        tw_c = twiddles(cols);
    }

    static std::vector<cplx> twiddles(std::size_t n) {
        std::vector<cplx> tw(n);
        for (std::size_t k = 0; k < n; ++k)
            tw[k] = std::polar(1.0, -two_pi * static_cast<double>(k) / static_cast<double>(n));
        return tw;
    }

    void fill_row(std::size_t m, std::vector<cplx>& row) const {
        const std::size_t mr = m / cols, mc = m % cols;
        for (std::size_t nr = 0; nr < rows; ++nr) {
            const cplx a = tw_r[(mr * nr) % rows];
            cplx* out = row.data() + nr * cols;
            for (std::size_t nc = 0; nc < cols; ++nc) out[nc] = a * tw_c[(mc * nc) % cols];
        }
    }

    std::size_t rows, cols;
    std::vector<cplx> tw_r, tw_c;
};

}  // namespace detail

inline constexpr std::size_t kaczmarz_size_cap = 4096;

/// Randomized-cyclic Kaczmarz sweeps on the magnitude system |<w_m, x>| =
/// sqrt(target_m). Each sweep visits every row once in a freshly shuffled
/// order, relinearizes the row at the current phase of <w_m, x> (phase 0 if
/// it vanishes), and ends with a phase-only projection that keeps previous
/// values where the amplitude is zero. One logged iteration is one sweep.
inline SolveResult run_kaczmarz(const IntensityGrid& target, const SolverConfig& cfg,
                                const ComplexGrid* x0 = nullptr) {
    cfg.validate();
    if (cfg.algorithm != Algorithm::kaczmarz) throw config_error("run_kaczmarz: algorithm mismatch");
    const std::size_t total = target.size();
    if (total > kaczmarz_size_cap)
        throw config_error("kaczmarz supports at most " + std::to_string(kaczmarz_size_cap) +
                           " elements per sweep (" + std::to_string(total) + " requested)");
    const LossNorm norm = cfg.normalize_loss ? LossNorm::normalized : LossNorm::raw;
    const double k = norm_constant(norm, total);

    ComplexGrid x = x0 ? *x0 : init_cartesian(target.shape, cfg.seed, cfg.init_variance);
    require_same_shape(x.shape, target.shape, "run_kaczmarz");

    std::vector<double> amp(total);
    for (std::size_t m = 0; m < total; ++m) amp[m] = std::sqrt(target[m]);

    const detail::KernelRows kernel(target.shape);
    std::vector<cplx> row(total);
    std::vector<std::size_t> order(total);
    for (std::size_t m = 0; m < total; ++m) order[m] = m;
    std::mt19937_64 order_engine(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
    const double inv_n = 1.0 / static_cast<double>(total);

    detail::RunClock clock;
    SolveResult result;
    // Unit projection that tolerates (measure-zero) exact zeros, for logging
    // and for the end-of-sweep projection.
    auto project_keep_zero = [](const ComplexGrid& v) {
        ComplexGrid out = v;
        for (cplx& z : out.data) {
            const double a = std::abs(z);
            if (a > 0.0) z /= a;
        }
        return out;
    };

    for (std::size_t sweep = 0; sweep < cfg.iterations; ++sweep) {
        {
            const ComplexGrid p = propagate(project_keep_zero(x));
            IntensityGrid displayed = intensity(p);
            double loss_sum = 0.0;
            for (std::size_t m = 0; m < total; ++m) {
                const double r = displayed[m] - target[m];
                loss_sum += r * r;
            }
            detail::require_finite_loss(k * loss_sum, "kaczmarz", sweep);
            if (detail::should_log(sweep, cfg.log_stride))
                result.log.push_back({sweep, k * loss_sum, psnr(displayed, target),
                                      detail::quiet_nan, detail::quiet_nan, clock.elapsed_ms()});
        }

        for (std::size_t i = total - 1; i > 0; --i) {
            const std::size_t j = order_engine() % (i + 1);
            std::swap(order[i], order[j]);
        }
        for (std::size_t m : order) {
            kernel.fill_row(m, row);
            cplx pm(0.0, 0.0);
            for (std::size_t n = 0; n < total; ++n) pm += row[n] * x[n];
            const double pa = std::abs(pm);
            const cplx phase = pa > 0.0 ? pm / pa : cplx(1.0, 0.0);
            const cplx step = (amp[m] * phase - pm) * inv_n;
            for (std::size_t n = 0; n < total; ++n) x[n] += step * std::conj(row[n]);
        }
        x = project_keep_zero(x);
    }

    result.final_hologram = x;
    result.displayed = intensity(propagate(result.final_hologram));
    result.cartesian_params = std::move(x);
    result.trajectory = std::nullopt;
    return result;
}

/// Runs the algorithm selected by cfg.algorithm.
inline SolveResult solve(const IntensityGrid& target, const SolverConfig& cfg) {
    switch (cfg.algorithm) {
        case Algorithm::wfcf: return run_wfcf(target, cfg);
        case Algorithm::wfpf:
        case Algorithm::wfpf_adam: return run_wfpf(target, cfg);
        case Algorithm::gs: return run_gs(target, cfg);
        case Algorithm::kaczmarz: return run_kaczmarz(target, cfg);
    }
    throw config_error("solve: unknown algorithm");
}

}  // namespace holoflow
