#pragma once

#include <stdexcept>
#include <string>

namespace stablab {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Parse or validation failure in a config file; carries the location.
class ConfigError : public Error {
public:
    ConfigError(int line, int col, const std::string& msg)
        : Error("line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + msg),
          line_(line),
          col_(col) {}

    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

/// A connected component exceeded the exact-solver cap. Carries the size so
/// callers can tell how far past the cap the instance was.
class ComponentTooLargeError : public Error {
public:
    ComponentTooLargeError(int size, int cap)
        : Error("component too large: size " + std::to_string(size) + " exceeds cap " +
                std::to_string(cap)),
          size_(size),
          cap_(cap) {}

    int size() const { return size_; }
    int cap() const { return cap_; }

private:
    int size_;
    int cap_;
};

}  // namespace stablab
