#pragma once

#include <stdexcept>
#include <string>

namespace cliporg {

/// Input bytes could not be parsed (bad container, truncated stream, ...).
struct DecodeError : std::runtime_error {
    explicit DecodeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The container parsed fine but uses an encoding this tool does not handle.
struct UnsupportedFormatError : std::runtime_error {
    explicit UnsupportedFormatError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A value fell outside the range a contract requires.
struct RangeError : std::runtime_error {
    explicit RangeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad user-facing input: missing file, empty clip, malformed option.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cliporg
