#pragma once

#include <stdexcept>
#include <string>

namespace nmar {

/// Invalid configuration or parameters supplied by the caller (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A synthetic model or joint law violating the generator constraints.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[noreturn]] void throw_config(const std::string& what);

}  // namespace nmar
