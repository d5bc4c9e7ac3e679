#pragma once

#include <stdexcept>
#include <string>

namespace rcoord {

// Every failure carries a short kind tag (EulerMismatch, Unsupported, ...)
// so reports can group them without parsing messages.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

[[noreturn]] inline void fail(const std::string& kind, const std::string& msg) {
    throw Error(kind, msg);
}

} // namespace rcoord
