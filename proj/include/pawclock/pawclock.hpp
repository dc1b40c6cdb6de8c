#pragma once

#include "pawclock/analysis.hpp"
#include "pawclock/clock.hpp"
#include "pawclock/errors.hpp"
#include "pawclock/tensor.hpp"
#include "pawclock/tidit.hpp"
#include "pawclock/universe.hpp"

namespace pawclock {
inline constexpr const char* kVersion = "0.1.0";
}
