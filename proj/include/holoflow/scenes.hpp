#pragma once

#include <cmath>
#include <string>

#include "grid.hpp"

namespace holoflow {

/// Deterministic grayscale scenes in [0, 1], used as stand-in planar images
/// when no corpus is at hand: smooth blobs, warped waves, and a shaded
/// checkerboard. 1D shapes take the middle row of the equivalent square
/// scene.
inline IntensityGrid make_scene(const std::string& name, const GridShape& shape) {
    shape.validate();
    const std::size_t rows = shape.is_2d() ? shape.rows() : shape.total();
    const std::size_t cols = shape.is_2d() ? shape.cols() : shape.total();

    auto value_at = [&](std::size_t r, std::size_t c) -> double {
        const double y = rows > 1 ? static_cast<double>(r) / static_cast<double>(rows - 1) : 0.5;
        const double x = cols > 1 ? static_cast<double>(c) / static_cast<double>(cols - 1) : 0.5;
        if (name == "blobs") {
            const double g1 = std::exp(-((x - 0.35) * (x - 0.35) + (y - 0.40) * (y - 0.40)) / 0.02);
            const double g2 = 0.7 * std::exp(-((x - 0.70) * (x - 0.70) + (y - 0.65) * (y - 0.65)) / 0.06);
            const double g3 = 0.4 * std::exp(-((x - 0.15) * (x - 0.15) + (y - 0.80) * (y - 0.80)) / 0.01);
            return g1 + g2 + g3;
        }
        if (name == "waves") {
            return 0.5 + 0.5 * std::sin(9.0 * x + 3.0 * std::sin(5.0 * y)) * std::cos(7.0 * y);
        }
        if (name == "checker") {
            const double tile = std::fmod(std::floor(x * 8.0) + std::floor(y * 8.0), 2.0);
            return tile * (0.3 + 0.7 * x * y) + 0.1;
        }
        throw config_error("unknown scene '" + name + "' (expected blobs, waves, or checker)");
    };

    IntensityGrid img(shape);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    if (shape.is_2d()) {
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                const double v = value_at(r, c);
                img[shape.linear(r, c)] = v;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    } else {
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = value_at(rows / 2, c);
            img[c] = v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }

    const double span = hi > lo ? hi - lo : 1.0;
    for (double& v : img.data) v = (v - lo) / span;
    return img;
}

inline const char* const scene_names[] = {"blobs", "waves", "checker"};

}  // namespace holoflow
