#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace floorloc {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Lengths disagree: distance kernel operands, or binary file counts that
// do not match the bytes actually present (trailing data, bad index...).
struct LengthMismatch : Error {
    using Error::Error;
};

// No reading in an observation resolves against the AP registry.
struct AllApsUnknown : Error {
    using Error::Error;
};

// WCL: no heard AP has an estimated position, or the total weight is zero.
struct NoCoverage : Error {
    using Error::Error;
};

// K-means: requested cluster count exceeds the number of input points.
struct KTooLarge : Error {
    using Error::Error;
};

// Campaign generation produced no audible fingerprint at all.
struct EmptyCampaign : Error {
    using Error::Error;
};

// Evaluation was asked to score an empty test set.
struct EmptyTestSet : Error {
    using Error::Error;
};

// Method id not one of nn | wcl | twostage | proposed.
struct UnknownMethod : Error {
    using Error::Error;
};

// Invalid run configuration (bad rho, missing flag, bad config file...).
struct ConfigError : Error {
    using Error::Error;
};

// Model / campaign / tracks built for different buildings.
struct BuildingMismatch : Error {
    using Error::Error;
};

// Text file failed validation. line is 1-based; 0 when no line applies.
struct MalformedFile : Error {
    std::size_t line;
    MalformedFile(std::size_t line_no, const std::string& reason)
        : Error(line_no ? "line " + std::to_string(line_no) + ": " + reason : reason),
          line(line_no) {}
};

// File declares a format version this build does not read.
struct VersionUnsupported : Error {
    using Error::Error;
};

// Binary file does not start with the expected magic.
struct BadMagic : Error {
    using Error::Error;
};

// Binary file ends before its declared content.
struct TruncatedFile : Error {
    using Error::Error;
};

// Filesystem-level failure (cannot open / write a path).
struct IoError : Error {
    using Error::Error;
};

}  // namespace floorloc
