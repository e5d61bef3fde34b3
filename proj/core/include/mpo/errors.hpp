#pragma once

#include <stdexcept>
#include <string>

namespace mpo {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape, extent, axis or permutation mismatch.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// SVD failed to converge within the sweep cap.
class SvdError : public Error {
public:
    using Error::Error;
};

/// Invalid shape plan, factor overrides or bond profile.
class PlanError : public Error {
public:
    using Error::Error;
};

/// Training aborted (non-finite loss, violated precondition).
class TrainError : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Bundle file failed validation. The kind distinguishes the first
/// check that failed so callers can report precisely.
class BundleError : public Error {
public:
    enum class Kind { Magic, Version, Crc, Shape };

    BundleError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace mpo
