#include "revint/log.hpp"

#include <iostream>
#include <mutex>

namespace revint::log {

namespace {
std::mutex g_mu;
Sink g_sink = [](std::string_view level, std::string_view message) {
  std::cerr << "[" << level << "] " << message << '\n';
};

void emit(std::string_view level, std::string_view message) {
  Sink sink;
  {
    std::lock_guard lock(g_mu);
    sink = g_sink;
  }
  if (sink) sink(level, message);
}
}  // namespace

Sink set_sink(Sink sink) {
  std::lock_guard lock(g_mu);
  std::swap(g_sink, sink);
  return sink;
}

void warn(std::string_view message) { emit("warn", message); }
void info(std::string_view message) { emit("info", message); }

}  // namespace revint::log
