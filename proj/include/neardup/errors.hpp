#pragma once

#include <stdexcept>
#include <string>

namespace neardup {

/// Input data violates a format or consistency contract (malformed lines,
/// duplicate ids, mismatched id sets). The CLI maps it to exit status 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (bad fraction,
/// unknown enum label, zero trials). The CLI maps it to exit status 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace neardup
