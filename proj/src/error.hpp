#pragma once

#include <stdexcept>
#include <string>

namespace mkge {

// Error categories mirrored by the C API status codes.
enum class ErrorCode {
    io = 1,
    parse = 2,
    config = 3,
    runtime = 4,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace mkge
