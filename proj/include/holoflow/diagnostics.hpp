#pragma once

#include <functional>
#include <sstream>

#include "gradients.hpp"
#include "grid.hpp"
#include "propagation.hpp"
#include "random.hpp"
#include "solvers.hpp"

namespace holoflow {

/// Outcome of one numerical certification pass.
struct TheoremReport {
    std::string name;
    std::size_t samples_checked = 0;
    double max_violation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string worst_case;
};

inline std::string to_text(const TheoremReport& r) {
    std::ostringstream os;
    os << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": max violation " << r.max_violation
       << " (tolerance " << r.tolerance << ", " << r.samples_checked << " samples)";
    if (!r.worst_case.empty()) os << " worst: " << r.worst_case;
    return os.str();
}

/// Witness parameters plus the intensity they display. The target is exactly
/// reachable by construction, so the amplitude-bound hypothesis holds.
inline std::pair<ComplexGrid, IntensityGrid> synthesize_feasible_target(const GridShape& shape,
                                                                        std::uint64_t seed) {
    ComplexGrid witness = init_cartesian(shape, seed, 0.04);
    IntensityGrid target = intensity(propagate(project_phase_only(witness)));
    return {std::move(witness), std::move(target)};
}

namespace detail {

inline std::string describe_sample(std::size_t iter, std::size_t index, cplx c, cplx g) {
    std::ostringstream os;
    os << "iter " << iter << " index " << index << " c=(" << c.real() << "," << c.imag()
       << ") grad=(" << g.real() << "," << g.imag() << ")";
    return os.str();
}

}  // namespace detail

/// Certifies that every recorded gradient is tangential: the phase of the
/// gradient differs from the phase of the parameter by +-pi/2, i.e.
/// Re[grad * conj(c)] vanishes relative to |grad| |c|.
inline TheoremReport check_theorem1(const Trajectory& traj) {
    if (traj.iters.empty()) throw config_error("check_theorem1: empty trajectory");
    TheoremReport report;
    report.name = "theorem1-tangential-gradient";
    report.tolerance = 1e-9;
    for (std::size_t k = 0; k < traj.iters.size(); ++k) {
        for (std::size_t i = 0; i < traj.indices.size(); ++i) {
            const cplx c = traj.params[k][i];
            const cplx g = traj.gradients[k][i];
            const double ga = std::abs(g);
            if (ga <= 1e-14) continue;
            const double v = std::abs(std::real(g * std::conj(c))) / (ga * std::abs(c));
            ++report.samples_checked;
            if (v > report.max_violation) {
                report.max_violation = v;
                report.worst_case = detail::describe_sample(traj.iters[k], traj.indices[i], c, g);
            }
        }
    }
    report.pass = report.max_violation <= report.tolerance;
    return report;
}

/// Certifies the amplitude bound |grad_n| <= 1/|c_n| along a run whose target
/// is exactly reachable. The bound applies to the gradient under fft/ifft
/// bookkeeping, where the inverse transform carries 1/N; snapshots stored
/// against the unnormalized adjoint are rescaled by norm_constant/N
/// accordingly.
inline TheoremReport check_theorem2(const Trajectory& traj, bool feasible_target) {
    if (traj.iters.empty()) throw config_error("check_theorem2: empty trajectory");
    if (!feasible_target)
        throw config_error("check_theorem2: target not flagged feasible; the amplitude bound "
                           "only applies to exactly reachable targets");
    if (traj.algorithm != Algorithm::wfcf)
        throw config_error("check_theorem2: requires a wfcf trajectory");

    const double n = static_cast<double>(traj.shape.total());
    const double to_normalized = traj.gradient_norm == LossNorm::raw ? 1.0 / (8.0 * n * n) : 1.0;
    const double scale = to_normalized / n;

    TheoremReport report;
    report.name = "theorem2-amplitude-bound";
    report.tolerance = 1e-12;
    report.max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.iters.size(); ++k) {
        for (std::size_t i = 0; i < traj.indices.size(); ++i) {
            const cplx c = traj.params[k][i];
            const cplx g = traj.gradients[k][i];
            const double v = std::abs(g) * scale - 1.0 / std::abs(c);
            ++report.samples_checked;
            if (v > report.max_violation) {
                report.max_violation = v;
                report.worst_case = detail::describe_sample(traj.iters[k], traj.indices[i], c, g);
            }
        }
    }
    report.pass = report.max_violation <= report.tolerance;
    return report;
}

/// Certifies the exact per-step amplitude identity
///   |c[t+1]|^2 = |c[t]|^2 + lr^2 |grad[t]|^2
/// together with amplitude monotonicity and the never-degenerates floor
/// min|c[t]| >= min|c[0]|. Requires consecutive snapshots of a wfcf run.
inline TheoremReport check_corollary1(const Trajectory& traj, double learning_rate) {
    if (traj.iters.size() < 2) throw config_error("check_corollary1: need at least two snapshots");
    if (traj.algorithm != Algorithm::wfcf)
        throw config_error("check_corollary1: amplitudes are constant for phase-only "
                           "parameterizations; requires a wfcf trajectory");
    for (std::size_t k = 1; k < traj.iters.size(); ++k)
        if (traj.iters[k] != traj.iters[k - 1] + 1)
            throw config_error("check_corollary1: snapshots must be consecutive (log_stride 1)");

    TheoremReport report;
    report.name = "corollary1-amplitude-growth";
    report.tolerance = 1e-10;

    double min0 = std::numeric_limits<double>::infinity();
    for (const cplx& c : traj.params.front()) min0 = std::min(min0, std::abs(c));

    for (std::size_t k = 0; k + 1 < traj.iters.size(); ++k) {
        for (std::size_t i = 0; i < traj.indices.size(); ++i) {
            const cplx c = traj.params[k][i];
            const cplx cn = traj.params[k + 1][i];
            const cplx g = traj.gradients[k][i];
            const double a2 = std::norm(c);
            const double b2 = std::norm(cn);
            const double step2 = learning_rate * learning_rate * std::norm(g);
            const double identity = std::abs(b2 - a2 - step2) / std::max(b2, a2);
            const double monotone = (std::abs(c) - std::abs(cn)) / std::abs(c);
            const double floor_viol = (min0 - std::abs(cn)) / min0;
            const double v = std::max({identity, monotone, floor_viol});
            ++report.samples_checked;
            if (v > report.max_violation) {
                report.max_violation = v;
                report.worst_case = detail::describe_sample(traj.iters[k], traj.indices[i], c, g);
            }
        }
    }
    report.pass = report.max_violation <= report.tolerance;
    return report;
}

/// Spectral consistency check: the displayed intensity |propagate(h)|^2 must
/// equal the forward transform of the circular autocorrelation of h. The
/// autocorrelation is evaluated by direct O(N^2) summation, independently of
/// the transform library. Returns the max absolute entrywise deviation.
inline double wiener_khinchin_check(const ComplexGrid& h) {
    const std::size_t rows = h.shape.is_2d() ? h.shape.rows() : 1;
    const std::size_t cols = h.shape.cols();

    ComplexGrid autocorr(h.shape);
    for (std::size_t sr = 0; sr < rows; ++sr) {
        for (std::size_t sc = 0; sc < cols; ++sc) {
            cplx sum(0.0, 0.0);
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < cols; ++c) {
                    const std::size_t rr = (r + sr) % rows;
                    const std::size_t cc = (c + sc) % cols;
                    sum += std::conj(h.data[r * cols + c]) * h.data[rr * cols + cc];
                }
            autocorr.data[sr * cols + sc] = sum;
        }
    }

    const ComplexGrid spectrum = propagate(autocorr);
    const IntensityGrid displayed = intensity(propagate(h));
    double max_dev = 0.0;
    for (std::size_t m = 0; m < displayed.size(); ++m)
        max_dev = std::max(max_dev, std::abs(spectrum[m] - displayed[m]));
    return max_dev;
}

/// Central-difference Wirtinger derivative of a real- or complex-valued loss:
/// (d/da + j d/db)/2 per entry. The oracle for the scalar lemma derivatives.
template <class LossFn>
ComplexGrid finite_difference_wirtinger(const LossFn& lossfn, ComplexGrid c, double step) {
    if (!(step > 0.0)) throw config_error("finite difference step must be positive");
    ComplexGrid grad(c.shape);
    for (std::size_t n = 0; n < c.size(); ++n) {
        const cplx orig = c[n];
        c[n] = orig + step;
        const double fa_p = lossfn(c);
        c[n] = orig - step;
        const double fa_m = lossfn(c);
        c[n] = orig + cplx(0.0, step);
        const double fb_p = lossfn(c);
        c[n] = orig - cplx(0.0, step);
        const double fb_m = lossfn(c);
        c[n] = orig;
        const double da = (fa_p - fa_m) / (2.0 * step);
        const double db = (fb_p - fb_m) / (2.0 * step);
        grad[n] = 0.5 * cplx(da, db);
    }
    return grad;
}

/// Central-difference steepest-descent gradient over the real/imaginary
/// parts, expressed as (dL/da) + j (dL/db) — twice the Wirtinger derivative.
/// The oracle matching wfcf_gradient's convention.
template <class LossFn>
ComplexGrid finite_difference_descent(const LossFn& lossfn, ComplexGrid c, double step) {
    ComplexGrid grad = finite_difference_wirtinger(lossfn, std::move(c), step);
    for (cplx& g : grad.data) g *= 2.0;
    return grad;
}

/// Scalar Definition-1 derivative of a complex-valued function of one complex
/// variable.
template <class Fn>
cplx finite_difference_wirtinger_scalar(const Fn& fn, cplx c, double step) {
    if (!(step > 0.0)) throw config_error("finite difference step must be positive");
    const cplx da = (fn(c + step) - fn(c - step)) / (2.0 * step);
    const cplx db = (fn(c + cplx(0.0, step)) - fn(c - cplx(0.0, step))) / (2.0 * step);
    return 0.5 * (da + cplx(0.0, 1.0) * db);
}

/// Central differences of a phase-parameterized loss in each phase entry.
template <class LossFn>
RealGrid finite_difference_phase(const LossFn& lossfn, PhaseGrid phi, double step) {
    if (!(step > 0.0)) throw config_error("finite difference step must be positive");
    RealGrid grad(phi.shape);
    for (std::size_t n = 0; n < phi.size(); ++n) {
        const double orig = phi[n];
        phi.data[n] = orig + step;
        const double fp = lossfn(phi);
        phi.data[n] = orig - step;
        const double fm = lossfn(phi);
        phi.data[n] = orig;
        grad[n] = (fp - fm) / (2.0 * step);
    }
    return grad;
}

}  // namespace holoflow
