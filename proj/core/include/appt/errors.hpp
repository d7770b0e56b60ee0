#pragma once

#include <stdexcept>
#include <string>

namespace appt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tensor shapes or layer widths do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input outside the domain of an operation (empty softmax slice, etc).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Well-formed call on data that cannot be processed (unlabeled sample,
/// fully masked sequence, out-of-range token id).
class DataError : public Error {
public:
    using Error::Error;
};

/// Unified diff text that cannot be turned into a snippet pair.
class MalformedDiff : public Error {
public:
    using Error::Error;
};

/// Model, vocabulary or tensor container that fails to load.
class LoadError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace appt
