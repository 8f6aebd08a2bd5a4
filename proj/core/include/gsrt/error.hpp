// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace gsrt {

/// Base of all library errors. Input and validation problems derive from
/// InputError; numerical failures during optimization raise NumericalError.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public InputError {
public:
    using InputError::InputError;
};

class SchemaError : public InputError {
public:
    using InputError::InputError;
};

/// A scene record that parses but breaks a Gaussian invariant.
class InvariantViolation : public InputError {
public:
    InvariantViolation(std::size_t index, std::string field, const std::string &what)
        : InputError("gaussian " + std::to_string(index) + ": field \"" + field + "\": " + what),
          index_(index), field_(std::move(field)) {}

    std::size_t index() const noexcept { return index_; }
    const std::string &field() const noexcept { return field_; }

private:
    std::size_t index_;
    std::string field_;
};

class IoError : public InputError {
public:
    using InputError::InputError;
};

class OutOfBounds : public InputError {
public:
    using InputError::InputError;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace gsrt
