#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace ddtrack {

// Non-fatal conditions (constant mismatches, truncated samples, ...) are
// routed through a process-wide handler. The default writes to stderr.
using WarningHandler = std::function<void(std::string_view)>;

void warn(std::string_view message);

// Installs a new handler and returns the previous one. Passing an empty
// function restores the stderr default.
WarningHandler set_warning_handler(WarningHandler handler);

// RAII capture of warnings, mostly for tests.
class ScopedWarningCapture {
public:
    ScopedWarningCapture();
    ~ScopedWarningCapture();
    ScopedWarningCapture(const ScopedWarningCapture&) = delete;
    ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

    [[nodiscard]] const std::string& text() const { return text_; }
    [[nodiscard]] int count() const { return count_; }

private:
    WarningHandler previous_;
    std::string text_;
    int count_ = 0;
};

}  // namespace ddtrack
