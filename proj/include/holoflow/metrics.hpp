#pragma once

#include <cstdio>
#include <filesystem>
#include <string_view>
#include <utility>

#include "config.hpp"
#include "grid.hpp"

namespace holoflow {

enum class PsnrScaling { none, least_squares };

struct PsnrOptions {
    PsnrScaling scaling = PsnrScaling::least_squares;
    double peak = 1.0;    // both grids are rescaled so the reference max equals this
    double cap_db = 99.0; // reported when the MSE vanishes

    void validate() const {
        if (!(peak > 0.0)) throw config_error("psnr peak must be positive");
    }
};

/// Scales a raw target so its total energy matches what a unit-amplitude
/// hologram delivers under the unnormalized transform: sum(target) = N^2.
inline IntensityGrid normalize_target(const IntensityGrid& raw) {
    double sum = 0.0;
    for (double v : raw.data) sum += v;
    if (!(sum > 0.0)) throw config_error("normalize_target: target is all zero");
    const double n = static_cast<double>(raw.size());
    const double scale = n * n / sum;
    IntensityGrid out(raw.shape);
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] * scale;
    return out;
}

/// Peak signal-to-noise ratio in dB between intensity images. Both grids are
/// first rescaled so the reference peaks at opts.peak; with least-squares
/// scaling the displayed image is additionally multiplied by the factor that
/// minimizes the MSE, making the score invariant to its global scale.
inline double psnr(const IntensityGrid& displayed, const IntensityGrid& reference,
                   const PsnrOptions& opts = {}) {
    opts.validate();
    require_same_shape(displayed.shape, reference.shape, "psnr");

    double ref_max = 0.0;
    for (double v : reference.data) ref_max = std::max(ref_max, v);
    if (!(ref_max > 0.0)) throw config_error("psnr: reference must have a positive maximum");

    const double k = opts.peak / ref_max;
    double scale = 1.0;
    if (opts.scaling == PsnrScaling::least_squares) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < displayed.size(); ++i) {
            num += displayed[i] * reference[i];
            den += displayed[i] * displayed[i];
        }
        scale = den > 0.0 ? num / den : 1.0;
    }

    double mse = 0.0;
    for (std::size_t i = 0; i < displayed.size(); ++i) {
        const double e = k * (scale * displayed[i] - reference[i]);
        mse += e * e;
    }
    mse /= static_cast<double>(displayed.size());
    if (mse == 0.0) return opts.cap_db;
    return 10.0 * std::log10(opts.peak * opts.peak / mse);
}

/// Projects one IterationRecord field into an (iter, value) series.
inline std::vector<std::pair<std::size_t, double>> extract_curve(
    const std::vector<IterationRecord>& log, std::string_view field) {
    double IterationRecord::* member = nullptr;
    if (field == "loss") member = &IterationRecord::loss;
    else if (field == "psnr_db") member = &IterationRecord::psnr_db;
    else if (field == "min_amp") member = &IterationRecord::min_amp;
    else if (field == "max_grad_amp") member = &IterationRecord::max_grad_amp;
    else if (field == "elapsed_ms") member = &IterationRecord::elapsed_ms;
    else if (field != "iter")
        throw config_error("extract_curve: unknown field '" + std::string(field) + "'");

    std::vector<std::pair<std::size_t, double>> series;
    series.reserve(log.size());
    for (const IterationRecord& rec : log)
        series.emplace_back(rec.iter, member ? rec.*member : static_cast<double>(rec.iter));
    return series;
}

/// Writes the convergence curve CSV: header
/// iter,loss,psnr_db,min_amp,max_grad_amp,elapsed_ms and one row per record.
/// Timings are zeroed unless requested, so identical runs serialize to
/// identical bytes.
inline void write_curve_csv(const std::vector<IterationRecord>& log,
                            const std::filesystem::path& path, bool include_timings = false) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw io_error("cannot open '" + path.string() + "' for writing");
    std::fputs("iter,loss,psnr_db,min_amp,max_grad_amp,elapsed_ms\n", f);
    for (const IterationRecord& rec : log) {
        std::fprintf(f, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", rec.iter, rec.loss, rec.psnr_db,
                     rec.min_amp, rec.max_grad_amp, include_timings ? rec.elapsed_ms : 0.0);
    }
    if (std::fclose(f) != 0) throw io_error("failed writing '" + path.string() + "'");
}

}  // namespace holoflow
