#include "kot/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>

#include <cstdlib>
#include <string>

namespace kot::log {

void init_from_env() {
  auto logger = spdlog::get("kot");
  if (!logger) logger = spdlog::stderr_color_mt("kot");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::err;
  if (const char* env = std::getenv("KOT_LOG"); env != nullptr) {
    const std::string v = env;
    if (v == "info") level = spdlog::level::info;
    else if (v == "debug") level = spdlog::level::debug;
    else if (v == "trace") level = spdlog::level::trace;
  }
  spdlog::set_level(level);
}

}  // namespace kot::log
