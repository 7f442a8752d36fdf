#pragma once

#include <stdexcept>
#include <string>

namespace newsaudit {

// Bad or missing configuration. Raised before any work starts.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error("config: " + what) {}
};

// File/stream level problems (unreadable store, unwritable output dir).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input data; carries the offending row when known.
class LoadError : public std::runtime_error {
public:
    LoadError(const std::string& file, long row, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(row) + ": " + what), row_(row) {}
    explicit LoadError(const std::string& what) : std::runtime_error(what), row_(-1) {}
    long row() const { return row_; }

private:
    long row_;
};

// A replay fixture has no entry for the requested probe.
class FixtureMissError : public std::runtime_error {
public:
    explicit FixtureMissError(const std::string& key)
        : std::runtime_error("fixture miss: " + key) {}
};

// Transient transport failure; collection retries these.
class TransportError : public std::runtime_error {
public:
    explicit TransportError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid argument to a numeric/metric operation (alpha <= 0, empty counts, ...).
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical routine failed to converge. Never swallowed.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace newsaudit
