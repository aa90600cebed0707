#pragma once

#include <stdexcept>
#include <string>

namespace docbin {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class BackendError : public Error {
public:
    using Error::Error;
};

class MissingGtError : public Error {
public:
    using Error::Error;
};

/// Ground truth contains no text pixels; FM/p-FM are undefined.
class EmptyGroundTruth : public Error {
public:
    using Error::Error;
};

/// Ground truth has no mixed 8x8 blocks; DRD is undefined.
class UniformGroundTruth : public Error {
public:
    using Error::Error;
};

/// Prediction equals ground truth exactly; PSNR is unbounded.
class InfinitePsnr : public Error {
public:
    using Error::Error;
};

class DegenerateInput : public Error {
public:
    using Error::Error;
};

class NonFiniteCritic : public Error {
public:
    using Error::Error;
};

}  // namespace docbin
