#include "idsfx/log.hpp"

#include <iostream>
#include <mutex>

namespace idsfx::log {

namespace {

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

Sink& current_sink() {
    static Sink sink = [](Level level, std::string_view message) {
        if (level == Level::Warning) std::cerr << "warning: " << message << '\n';
    };
    return sink;
}

void emit(Level level, std::string_view message) {
    std::lock_guard lock(sink_mutex());
    if (current_sink()) current_sink()(level, message);
}

}  // namespace

Sink set_sink(Sink sink) {
    std::lock_guard lock(sink_mutex());
    Sink previous = std::move(current_sink());
    current_sink() = std::move(sink);
    return previous;
}

void info(std::string_view message) { emit(Level::Info, message); }
void warn(std::string_view message) { emit(Level::Warning, message); }

ScopedCapture::ScopedCapture() {
    previous_ = set_sink([this](Level level, std::string_view message) {
        if (level == Level::Warning) {
            warnings_.append(message);
            warnings_.push_back('\n');
        }
    });
}

ScopedCapture::~ScopedCapture() { set_sink(std::move(previous_)); }

bool ScopedCapture::warned_about(std::string_view needle) const {
    return warnings_.find(needle) != std::string::npos;
}

}  // namespace idsfx::log
