#pragma once

#include <stdexcept>
#include <string>

namespace semviz {

// Base of every exception raised by the engine.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, std::string field = {})
        : std::runtime_error(message), code_(std::move(code)), field_(std::move(field)) {}

    const std::string& code() const noexcept { return code_; }
    // Offending input element (config entry, request field, column name); may be empty.
    const std::string& field() const noexcept { return field_; }

private:
    std::string code_;
    std::string field_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message, std::string field = {})
        : Error("config_error", message, std::move(field)) {}
};

class FormatError : public Error {
public:
    explicit FormatError(const std::string& message, std::string field = {})
        : Error("format_error", message, std::move(field)) {}
};

class BuildError : public Error {
public:
    explicit BuildError(const std::string& message, std::string field = {})
        : Error("build_error", message, std::move(field)) {}
};

class QueryError : public Error {
public:
    explicit QueryError(const std::string& message, std::string field = {})
        : Error("invalid_request", message, std::move(field)) {}
};

class NotFound : public Error {
public:
    explicit NotFound(const std::string& message, std::string field = {})
        : Error("not_found", message, std::move(field)) {}
};

} // namespace semviz
