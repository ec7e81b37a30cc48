#include "rocofscreen/log.hpp"

#include <cstdlib>
#include <memory>

#include <spdlog/sinks/stdout_sinks.h>

namespace rocofscreen {

spdlog::logger& logger() {
    static const std::shared_ptr<spdlog::logger> instance = [] {
        auto sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
        auto log = std::make_shared<spdlog::logger>("rocofscreen", sink);
        log->set_pattern("[%l] %v");
        const char* env = std::getenv("ROCOF_SCREEN_LOG");
        log->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
        return log;
    }();
    return *instance;
}

}  // namespace rocofscreen
