#pragma once

#include <stdexcept>
#include <string>

namespace lungpipe {

/// Caller-supplied argument, option, or input data is invalid.
/// CLI maps this (and format_error) to exit code 2.
class argument_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Bytes do not form a valid file of the expected format.
class format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A file could not be read or written.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Segmentation could not produce a usable result on this image
/// (degenerate histogram, no interior component, marker covers everything).
class segmentation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure: singular system, rank deficiency, non-convergence.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lungpipe
