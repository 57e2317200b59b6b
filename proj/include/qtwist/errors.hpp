#pragma once

#include <stdexcept>
#include <string>

namespace qtwist {

// Exit-code mapping: config 1, math/precision 2, I/O 3.

struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
    static constexpr int exit_code = 1;
};

struct math_error : std::runtime_error {
    explicit math_error(const std::string& msg) : std::runtime_error(msg) {}
    static constexpr int exit_code = 2;
};

struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
    static constexpr int exit_code = 3;
};

}  // namespace qtwist
