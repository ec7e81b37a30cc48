#pragma once

#include <spdlog/spdlog.h>

namespace rocofscreen {

/// Library logger writing to stderr. The level comes from ROCOF_SCREEN_LOG
/// (trace, debug, info, warn, error, off) and defaults to warn.
spdlog::logger& logger();

}  // namespace rocofscreen
