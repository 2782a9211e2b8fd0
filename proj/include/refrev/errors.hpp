#pragma once

#include <stdexcept>
#include <string>

namespace refrev {

/// Bad or unreadable input data (facts, histories, front files). CLI exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The document is not well-formed or does not follow the expected schema.
class ParseError : public InputError {
public:
    using InputError::InputError;
};

/// The document parsed but violates a model invariant (dangling id, cycle, ...).
class ValidationError : public InputError {
public:
    using InputError::InputError;
};

class UnknownIdError : public InputError {
public:
    using InputError::InputError;
};

/// Hyperparameters or plans outside their documented range. CLI exit code 3.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace refrev
