#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"

namespace holoflow {

using cplx = std::complex<double>;

inline constexpr double two_pi = 6.28318530717958647692528676655900577;

/// Wraps a phase to [0, 2*pi).
inline double wrap_phase(double x) {
    x = std::fmod(x, two_pi);
    if (x < 0.0) x += two_pi;
    if (x >= two_pi) x = 0.0;
    return x;
}

/// Extents of a 1D or 2D grid. 2D grids are stored row-major:
/// linear index = row * cols + col. Every module uses this linearization.
struct GridShape {
    std::vector<std::size_t> dims;

    static GridShape line(std::size_t n) { return GridShape{{n}}; }
    static GridShape plane(std::size_t rows, std::size_t cols) { return GridShape{{rows, cols}}; }

    bool is_2d() const { return dims.size() == 2; }
    std::size_t rows() const { return is_2d() ? dims[0] : 1; }
    std::size_t cols() const { return is_2d() ? dims[1] : dims.at(0); }

    std::size_t total() const {
        std::size_t n = 1;
        for (std::size_t d : dims) n *= d;
        return n;
    }

    std::size_t linear(std::size_t r, std::size_t c) const { return r * cols() + c; }

    void validate() const {
        if (dims.empty() || dims.size() > 2)
            throw config_error("grid shape must be 1D or 2D");
        for (std::size_t d : dims)
            if (d == 0) throw config_error("grid extents must be positive");
    }

    std::string str() const {
        std::string s = std::to_string(dims[0]);
        for (std::size_t i = 1; i < dims.size(); ++i) s += "x" + std::to_string(dims[i]);
        return s;
    }

    bool operator==(const GridShape&) const = default;
};

/// Dense complex values over a GridShape.
struct ComplexGrid {
    GridShape shape;
    std::vector<cplx> data;

    ComplexGrid() = default;
    explicit ComplexGrid(GridShape s) : shape(std::move(s)), data(shape.total()) { shape.validate(); }
    ComplexGrid(GridShape s, std::vector<cplx> d) : shape(std::move(s)), data(std::move(d)) {
        shape.validate();
        if (data.size() != shape.total()) throw config_error("complex grid data does not match shape");
    }

    std::size_t size() const { return data.size(); }
    cplx& operator[](std::size_t i) { return data[i]; }
    const cplx& operator[](std::size_t i) const { return data[i]; }
};

/// Dense real values (signed) over a GridShape.
struct RealGrid {
    GridShape shape;
    std::vector<double> data;

    RealGrid() = default;
    explicit RealGrid(GridShape s) : shape(std::move(s)), data(shape.total(), 0.0) { shape.validate(); }
    RealGrid(GridShape s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
        shape.validate();
        if (data.size() != shape.total()) throw config_error("real grid data does not match shape");
    }

    std::size_t size() const { return data.size(); }
    double& operator[](std::size_t i) { return data[i]; }
    const double& operator[](std::size_t i) const { return data[i]; }
};

/// Nonnegative real values: a target |i|^2 or a displayed |p|^2.
struct IntensityGrid {
    GridShape shape;
    std::vector<double> data;

    IntensityGrid() = default;
    explicit IntensityGrid(GridShape s) : shape(std::move(s)), data(shape.total(), 0.0) { shape.validate(); }
    IntensityGrid(GridShape s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
        shape.validate();
        if (data.size() != shape.total()) throw config_error("intensity grid data does not match shape");
        validate();
    }

    void validate() const {
        for (double v : data)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw config_error("intensity values must be finite and nonnegative");
    }

    std::size_t size() const { return data.size(); }
    double& operator[](std::size_t i) { return data[i]; }
    const double& operator[](std::size_t i) const { return data[i]; }
};

/// Real phases in [0, 2*pi); values are wrapped on construction and on set().
struct PhaseGrid {
    GridShape shape;
    std::vector<double> data;

    PhaseGrid() = default;
    explicit PhaseGrid(GridShape s) : shape(std::move(s)), data(shape.total(), 0.0) { shape.validate(); }
    PhaseGrid(GridShape s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
        shape.validate();
        if (data.size() != shape.total()) throw config_error("phase grid data does not match shape");
        for (double& v : data) v = wrap_phase(v);
    }

    void set(std::size_t i, double v) { data[i] = wrap_phase(v); }
    void wrap_all() {
        for (double& v : data) v = wrap_phase(v);
    }

    std::size_t size() const { return data.size(); }
    const double& operator[](std::size_t i) const { return data[i]; }
};

inline bool all_finite(const ComplexGrid& g) {
    for (const cplx& v : g.data)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

inline double min_amplitude(const ComplexGrid& g) {
    double m = std::numeric_limits<double>::infinity();
    for (const cplx& v : g.data) m = std::min(m, std::abs(v));
    return m;
}

inline void require_same_shape(const GridShape& a, const GridShape& b, const char* what) {
    if (!(a == b))
        throw config_error(std::string(what) + ": shape mismatch (" + a.str() + " vs " + b.str() + ")");
}

}  // namespace holoflow
