#pragma once

#include <stdexcept>
#include <string>

namespace ccfuse {

// Base of every error thrown by the library. The CLI maps the three
// families below onto exit codes 2, 3 and 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: malformed files, violated preconditions, out-of-range arguments.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A numerical procedure could not deliver a result.
class NumericalError : public Error {
public:
    using Error::Error;
};

// The data are valid but carry no usable information for the request.
class DegenerateData : public Error {
public:
    using Error::Error;
};

class BracketError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class FlatModeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class MonotonicityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class TransformFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class GridCoverageError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class UndefinedEstimate : public DegenerateData {
public:
    using DegenerateData::DegenerateData;
};

}  // namespace ccfuse
