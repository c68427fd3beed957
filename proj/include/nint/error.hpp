#pragma once

#include <stdexcept>
#include <string>

namespace nint {

// Base error for everything the toolkit throws. `code` is a short stable
// identifier used by the C API and machine-readable error reports.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

inline Error unknown_label(const std::string& slot, const std::string& raw) {
    return Error("UnknownLabel", "unknown label '" + raw + "' for slot '" + slot + "'");
}

inline Error parse_error(long line, const std::string& reason) {
    return Error("ParseError", "line " + std::to_string(line) + ": " + reason);
}

inline Error config_error(const std::string& reason) {
    return Error("ConfigError", reason);
}

}  // namespace nint
