// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace rfbsr {

/// Base class for all library errors. Every subclass maps to a distinct
/// process exit code in the CLI (see tools/).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent configuration (bad key, bad value, scale/plan mismatch).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Filesystem problems: missing files, unreadable or unwritable paths.
class IoError : public Error {
public:
    using Error::Error;
};

/// Checkpoint file problems: bad magic, checksum failure, fingerprint or
/// name/shape mismatch.
class CheckpointError : public Error {
public:
    using Error::Error;
};

/// Tensor shape or domain violations (channel mismatch, empty concat, ...).
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite loss or gradient.
class DivergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace rfbsr
