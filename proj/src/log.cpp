#include "evsel/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace evsel::log {

static Level parse_env() {
  const char* env = std::getenv("EVSEL_LOG");
  if (!env) return Level::warn;
  if (std::strcmp(env, "error") == 0) return Level::error;
  if (std::strcmp(env, "warn") == 0) return Level::warn;
  if (std::strcmp(env, "info") == 0) return Level::info;
  if (std::strcmp(env, "debug") == 0) return Level::debug;
  return Level::warn;
}

Level level() {
  static const Level lvl = parse_env();
  return lvl;
}

void write(Level lvl, const std::string& msg) {
  if (lvl > level()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "[evsel %s] %s\n", names[static_cast<int>(lvl)], msg.c_str());
}

}  // namespace evsel::log
