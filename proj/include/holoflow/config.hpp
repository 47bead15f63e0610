#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace holoflow {

enum class Algorithm { wfcf, wfpf, wfpf_adam, gs, kaczmarz };

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::wfcf: return "wfcf";
        case Algorithm::wfpf: return "wfpf";
        case Algorithm::wfpf_adam: return "wfpf-adam";
        case Algorithm::gs: return "gs";
        case Algorithm::kaczmarz: return "kaczmarz";
    }
    return "?";
}

inline Algorithm algorithm_from_name(const std::string& s) {
    if (s == "wfcf") return Algorithm::wfcf;
    if (s == "wfpf") return Algorithm::wfpf;
    if (s == "wfpf-adam") return Algorithm::wfpf_adam;
    if (s == "gs") return Algorithm::gs;
    if (s == "kaczmarz") return Algorithm::kaczmarz;
    throw config_error("unknown algorithm '" + s + "'");
}

struct AdamParams {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const {
        if (!(beta1 >= 0.0 && beta1 < 1.0)) throw config_error("adam beta1 must be in [0,1)");
        if (!(beta2 >= 0.0 && beta2 < 1.0)) throw config_error("adam beta2 must be in [0,1)");
        if (!(epsilon > 0.0)) throw config_error("adam epsilon must be positive");
    }
};

/// One solver run. `normalize_loss` selects whether the 1/(8N^2) constant of
/// the loss (and its gradient) is applied during stepping and logging; the
/// stated learning rates are calibrated for the normalized scale, so it is on
/// by default.
struct SolverConfig {
    Algorithm algorithm = Algorithm::wfcf;
    double learning_rate = 1e-2;
    std::size_t iterations = 1000;
    std::uint64_t seed = 0;
    double init_variance = 0.01;
    bool normalize_loss = true;
    AdamParams adam;
    std::size_t log_stride = 1;
    std::optional<std::vector<std::size_t>> snapshot_indices;

    void validate() const {
        if (!(learning_rate > 0.0)) throw config_error("learning_rate must be positive");
        if (iterations < 1) throw config_error("iterations must be at least 1");
        if (!(init_variance > 0.0)) throw config_error("init_variance must be positive");
        if (log_stride < 1) throw config_error("log_stride must be at least 1");
        adam.validate();
    }
};

/// Per-iteration scalars sampled at the top of the iteration, before the
/// update. min_amp is meaningful for wfcf only and max_grad_amp for the
/// gradient methods; both are NaN otherwise.
struct IterationRecord {
    std::size_t iter = 0;
    double loss = 0.0;
    double psnr_db = 0.0;
    double min_amp = 0.0;
    double max_grad_amp = 0.0;
    double elapsed_ms = 0.0;
};

}  // namespace holoflow
