#pragma once

#include "grid.hpp"
#include "propagation.hpp"

namespace holoflow {

/// Loss scale. `normalized` applies the constant 1/(8 N^2) to the raw
/// quartic sum; the normalized gradient is the raw gradient times the same
/// constant, exactly.
enum class LossNorm { raw, normalized };

inline double norm_constant(LossNorm norm, std::size_t total) {
    if (norm == LossNorm::raw) return 1.0;
    const double n = static_cast<double>(total);
    return 1.0 / (8.0 * n * n);
}

namespace detail {

inline void require_nonzero_amplitudes(const ComplexGrid& c, const char* what) {
    for (std::size_t n = 0; n < c.size(); ++n)
        if (std::abs(c[n]) == 0.0)
            throw numeric_error(std::string(what) + ": zero-amplitude entry " + std::to_string(n));
}

}  // namespace detail

/// Combined loss/gradient evaluation for the Cartesian parameterization; the
/// solver hot path reuses the propagated field for logging.
struct WfcfEval {
    double loss = 0.0;
    ComplexGrid gradient;
    IntensityGrid displayed;
};

/// Combined loss/gradient evaluation for the phase parameterization.
struct WfpfEval {
    double loss = 0.0;
    RealGrid gradient;
    IntensityGrid displayed;
};

/// Evaluates the quartic intensity-matching loss and its Cartesian gradient
/// at c in one pass:
///
///   h = c/|c|,  p = propagate(h),  R_m = |p_m|^2 - target_m,
///   t = adjoint_propagate(R .* p),
///   gradient_n = k * 4j * (c_n/|c_n|^2) * Im[t_n * conj(c_n)/|c_n|],
///   loss       = k * sum_m R_m^2,
///
/// with k the LossNorm constant. The gradient is the steepest-descent
/// direction of the loss over the real and imaginary parts, expressed as the
/// complex number (dL/da_n) + j (dL/db_n); it is tangential to c_n, so a
/// gradient step can only grow each amplitude.
inline WfcfEval wfcf_evaluate(const ComplexGrid& c, const IntensityGrid& target, LossNorm norm) {
    require_same_shape(c.shape, target.shape, "wfcf_evaluate");
    detail::require_nonzero_amplitudes(c, "wfcf gradient");

    const ComplexGrid h = project_phase_only(c);
    const ComplexGrid p = propagate(h);

    WfcfEval eval;
    eval.displayed = intensity(p);

    ComplexGrid weighted(p.shape);
    double loss_sum = 0.0;
    for (std::size_t m = 0; m < p.size(); ++m) {
        const double r = eval.displayed[m] - target[m];
        loss_sum += r * r;
        weighted[m] = r * p[m];
    }
    const ComplexGrid t = adjoint_propagate(weighted);

    const double k = norm_constant(norm, c.size());
    eval.loss = k * loss_sum;
    eval.gradient = ComplexGrid(c.shape);
    for (std::size_t n = 0; n < c.size(); ++n) {
        const double amp = std::abs(c[n]);
        const double tangent = std::imag(t[n] * std::conj(c[n]) / amp);
        eval.gradient[n] = k * 4.0 * tangent * cplx(0.0, 1.0) * c[n] / (amp * amp);
    }
    return eval;
}

/// Same loss evaluated on the phase parameterization h_n = exp(j phi_n), with
/// its derivative in each phase: gradient_n = k * 4 * Im[s_n exp(-j phi_n)],
/// s = adjoint_propagate(R .* p).
inline WfpfEval wfpf_evaluate(const PhaseGrid& phi, const IntensityGrid& target, LossNorm norm) {
    require_same_shape(phi.shape, target.shape, "wfpf_evaluate");

    ComplexGrid h(phi.shape);
    for (std::size_t n = 0; n < phi.size(); ++n) h[n] = std::polar(1.0, phi[n]);
    const ComplexGrid p = propagate(h);

    WfpfEval eval;
    eval.displayed = intensity(p);

    ComplexGrid weighted(p.shape);
    double loss_sum = 0.0;
    for (std::size_t m = 0; m < p.size(); ++m) {
        const double r = eval.displayed[m] - target[m];
        loss_sum += r * r;
        weighted[m] = r * p[m];
    }
    const ComplexGrid s = adjoint_propagate(weighted);

    const double k = norm_constant(norm, phi.size());
    eval.loss = k * loss_sum;
    eval.gradient = RealGrid(phi.shape);
    for (std::size_t n = 0; n < phi.size(); ++n)
        eval.gradient[n] = k * 4.0 * std::imag(s[n] * std::conj(h[n]));
    return eval;
}

/// Loss only. L = k * sum_m (|p_m(c)|^2 - target_m)^2 with p the propagated
/// phase-only hologram of c.
inline double loss(const ComplexGrid& c, const IntensityGrid& target, LossNorm norm = LossNorm::raw) {
    require_same_shape(c.shape, target.shape, "loss");
    detail::require_nonzero_amplitudes(c, "loss");
    const ComplexGrid p = propagate(project_phase_only(c));
    double sum = 0.0;
    for (std::size_t m = 0; m < p.size(); ++m) {
        const double r = std::norm(p[m]) - target[m];
        sum += r * r;
    }
    return norm_constant(norm, c.size()) * sum;
}

/// Loss of a phase-parameterized hologram.
inline double loss(const PhaseGrid& phi, const IntensityGrid& target, LossNorm norm = LossNorm::raw) {
    require_same_shape(phi.shape, target.shape, "loss");
    ComplexGrid h(phi.shape);
    for (std::size_t n = 0; n < phi.size(); ++n) h[n] = std::polar(1.0, phi[n]);
    const ComplexGrid p = propagate(h);
    double sum = 0.0;
    for (std::size_t m = 0; m < p.size(); ++m) {
        const double r = std::norm(p[m]) - target[m];
        sum += r * r;
    }
    return norm_constant(norm, phi.size()) * sum;
}

inline ComplexGrid wfcf_gradient(const ComplexGrid& c, const IntensityGrid& target,
                                 LossNorm norm = LossNorm::raw) {
    return wfcf_evaluate(c, target, norm).gradient;
}

inline RealGrid wfpf_gradient(const PhaseGrid& phi, const IntensityGrid& target,
                              LossNorm norm = LossNorm::raw) {
    return wfpf_evaluate(phi, target, norm).gradient;
}

/// Wirtinger derivative of c/|c| with respect to conj(c):
/// -(1/2) (1/|c|) (c/|c|)^2.
inline cplx lemma1_derivative(cplx c) {
    const double amp = std::abs(c);
    if (amp == 0.0) throw numeric_error("lemma1_derivative: zero amplitude");
    const cplx unit = c / amp;
    return -0.5 / amp * unit * unit;
}

/// Wirtinger derivative of conj(c)/|c| with respect to conj(c): (1/2) (1/|c|).
inline cplx lemma2_derivative(cplx c) {
    const double amp = std::abs(c);
    if (amp == 0.0) throw numeric_error("lemma2_derivative: zero amplitude");
    return cplx(0.5 / amp, 0.0);
}

}  // namespace holoflow
