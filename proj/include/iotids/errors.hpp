#pragma once

#include <stdexcept>
#include <string>

namespace iotids {

// Exit-code mapping used by the CLI: UsageError -> 1, DataError -> 2,
// NumericError -> 3.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace iotids
