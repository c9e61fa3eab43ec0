#pragma once

#include <stdexcept>
#include <string>

namespace qnml {

/// Malformed or inconsistent input data (bad CSV, bad network file,
/// violated preconditions on user-supplied values).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation was refused because it would exceed a size guard
/// (too many variables, enumeration too large, memory budget).
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void data_error(const std::string& what) { throw DataError(what); }
[[noreturn]] inline void resource_error(const std::string& what) { throw ResourceError(what); }

}  // namespace detail
}  // namespace qnml
