#pragma once

#include <stdexcept>
#include <string>

namespace syngraph {

// Base for all errors surfaced to the CLI. exit_code() maps onto the process
// exit status: 2 config, 3 data, 4 capacity / fit.
class Error : public std::runtime_error {
public:
    Error(const std::string& what, int code) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] int exit_code() const noexcept { return code_; }

private:
    int code_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what, 2) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(what, 3) {}
};

class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& what) : Error(what, 4) {}
};

class FitError : public Error {
public:
    explicit FitError(const std::string& what) : Error(what, 4) {}
};

} // namespace syngraph
