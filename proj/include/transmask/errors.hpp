#pragma once

#include <stdexcept>
#include <string>

namespace transmask {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raster sizes are zero, overflow, or disagree between operands.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value (even structuring element, negative sigma, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A file exists but does not hold what was expected (bit depth, channels, schema).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Dataset layout or pair contents violate a documented contract.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Metrics requested over an empty pixel set.
class EmptyEvaluationError : public Error {
public:
    using Error::Error;
};

/// Filesystem failures (unreadable root, missing directory, failed write).
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace transmask
