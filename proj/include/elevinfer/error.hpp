#pragma once

#include <stdexcept>
#include <string>

namespace elev {

// Error categories map 1:1 onto CLI exit codes (see tools/).
//   UsageError   -> 2   bad flags / config
//   DataError    -> 3   malformed or inconsistent input data
//   RuntimeError -> 4   numeric failures, provider failures
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& msg) : Error(msg) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

class RuntimeError : public Error {
public:
    explicit RuntimeError(const std::string& msg) : Error(msg) {}
};

}  // namespace elev
