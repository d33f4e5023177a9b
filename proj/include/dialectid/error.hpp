#pragma once

#include <stdexcept>
#include <string>

namespace dialectid {

// Base of everything the core throws. The C API maps IoError to DID_ERR_IO
// and every other Error to DID_ERR_VALIDATION.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class ChecksumError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace dialectid
