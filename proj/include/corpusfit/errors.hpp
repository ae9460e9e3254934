#pragma once

#include <stdexcept>
#include <string>

namespace corpusfit {

// Error categories map 1:1 onto CLI exit codes (usage=1, data=2, numerical=3).
struct usage_error : std::runtime_error {
    explicit usage_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct data_error : std::runtime_error {
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace corpusfit
