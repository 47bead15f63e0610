#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

#include "grid.hpp"

namespace holoflow {

/// Smallest amplitude allowed for an initial parameter; entries below it are
/// re-drawn so that the phase-only projection is defined from the start.
inline constexpr double amplitude_floor = 1e-12;

/// Deterministic Gaussian stream. Box-Muller over mt19937_64 so the byte-exact
/// sequence does not depend on the standard library's distribution internals.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    /// Uniform draw in (0, 1].
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// One pair of independent standard normals.
    std::pair<double, double> normal_pair() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return {r * std::cos(two_pi * u2), r * std::sin(two_pi * u2)};
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Draws an initial parameter grid from a circularly-symmetric complex
/// Gaussian with E|c|^2 = variance (each real component has variance/2).
/// Entries with amplitude below amplitude_floor are re-drawn; the draw is a
/// pure function of (shape, seed, variance).
inline ComplexGrid init_cartesian(const GridShape& shape, std::uint64_t seed, double variance = 0.01) {
    shape.validate();
    if (!(variance > 0.0)) throw config_error("init variance must be positive");

    GaussianSource source(seed);
    const double sd = std::sqrt(variance / 2.0);
    ComplexGrid out(shape);
    for (std::size_t n = 0; n < out.size(); ++n) {
        cplx value;
        int draws = 0;
        do {
            if (++draws > 100)
                throw numeric_error("degenerate sample: entry " + std::to_string(n) +
                                    " stayed below the amplitude floor after 100 draws");
            auto [re, im] = source.normal_pair();
            value = cplx(sd * re, sd * im);
        } while (std::abs(value) < amplitude_floor);
        out[n] = value;
    }
    return out;
}

/// Phase pattern of an initial parameter grid, wrapped to [0, 2*pi).
inline PhaseGrid init_phase_from(const ComplexGrid& c0) {
    PhaseGrid out(c0.shape);
    for (std::size_t n = 0; n < c0.size(); ++n) {
        if (std::abs(c0[n]) == 0.0)
            throw numeric_error("zero-amplitude entry " + std::to_string(n) +
                                ": argument undefined");
        out.set(n, std::arg(c0[n]));
    }
    return out;
}

}  // namespace holoflow
