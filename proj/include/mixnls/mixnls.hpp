#pragma once

#include "mixnls/analysis.hpp"
#include "mixnls/errors.hpp"
#include "mixnls/geometry.hpp"
#include "mixnls/integrator.hpp"
#include "mixnls/model.hpp"
#include "mixnls/roots.hpp"
#include "mixnls/scaling.hpp"

namespace mixnls {

inline constexpr const char* version = "mixnls 0.1.0";

} // namespace mixnls
