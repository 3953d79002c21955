#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace idsfx::log {

enum class Level { Info, Warning };

using Sink = std::function<void(Level, std::string_view)>;

// Replaces the process-wide sink and returns the previous one. The default
// sink writes warnings to stderr and drops info messages.
Sink set_sink(Sink sink);

void info(std::string_view message);
void warn(std::string_view message);

// Captures messages for the lifetime of the object (tests use this to check
// that a warning was emitted).
class ScopedCapture {
public:
    ScopedCapture();
    ~ScopedCapture();
    ScopedCapture(const ScopedCapture&) = delete;
    ScopedCapture& operator=(const ScopedCapture&) = delete;

    const std::string& warnings() const { return warnings_; }
    bool warned_about(std::string_view needle) const;

private:
    Sink previous_;
    std::string warnings_;
};

}  // namespace idsfx::log
