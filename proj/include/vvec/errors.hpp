#pragma once

#include <stdexcept>
#include <string>

namespace vvec {

// Exit-code mapping: ConfigError -> 1 (usage/config), DataError -> 2 (bad input data).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace vvec
