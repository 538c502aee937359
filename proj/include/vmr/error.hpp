#pragma once

#include <stdexcept>
#include <string>

namespace vmr {

// Bad argument or violated precondition. Maps to exit code 1 in the CLI.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed input data (files, records, feature tracks). Maps to exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vmr
