#include "ddtrack/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace ddtrack {

namespace {

std::mutex& handler_mutex() {
    static std::mutex m;
    return m;
}

WarningHandler& handler_slot() {
    static WarningHandler h;
    return h;
}

}  // namespace

void warn(std::string_view message) {
    std::lock_guard lock(handler_mutex());
    if (auto& h = handler_slot()) {
        h(message);
    } else {
        std::cerr << "warning: " << message << '\n';
    }
}

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(handler_mutex());
    auto previous = std::move(handler_slot());
    handler_slot() = std::move(handler);
    return previous;
}

ScopedWarningCapture::ScopedWarningCapture() {
    previous_ = set_warning_handler([this](std::string_view msg) {
        text_.append(msg);
        text_.push_back('\n');
        ++count_;
    });
}

ScopedWarningCapture::~ScopedWarningCapture() {
    set_warning_handler(std::move(previous_));
}

}  // namespace ddtrack
