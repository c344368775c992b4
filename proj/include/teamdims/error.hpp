#pragma once

#include <stdexcept>
#include <string>

namespace teamdims {

// Base class for everything this library throws on its own behalf.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file (bad line, bad column, bad value). Message names the
// offending location.
class parse_error : public error {
public:
    using error::error;
};

// A contract violation on otherwise well-formed inputs (length mismatch,
// duplicate id, fingerprint mismatch, ...).
class validation_error : public error {
public:
    using error::error;
};

// Filesystem trouble: unreadable input, unwritable output.
class io_error : public error {
public:
    using error::error;
};

} // namespace teamdims
