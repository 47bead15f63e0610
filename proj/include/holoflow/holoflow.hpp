#pragma once

#include "config.hpp"
#include "diagnostics.hpp"
#include "errors.hpp"
#include "gradients.hpp"
#include "grid.hpp"
#include "imageio.hpp"
#include "metrics.hpp"
#include "propagation.hpp"
#include "random.hpp"
#include "scenes.hpp"
#include "solvers.hpp"

namespace holoflow {

inline constexpr const char* version = "0.1.0";

}
