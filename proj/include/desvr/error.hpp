#ifndef DESVR_ERROR_HPP
#define DESVR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace desvr {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied argument or configuration violates a precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Input data is malformed (parse failures, dimension mismatches, gaps).
class DataError : public Error {
public:
    using Error::Error;
};

/// The SVR solver or an optimizer could not produce a valid result,
/// e.g. an objective returned a non-finite value.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message)
{
    if (!condition)
        throw InvalidArgument(message);
}

} // namespace detail
} // namespace desvr

#endif
