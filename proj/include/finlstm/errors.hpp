#pragma once

#include <stdexcept>
#include <string>

namespace finlstm {

// Bad configuration or unusable inputs detected before any work starts.
// The CLI maps this to exit code 1; other exceptions map to 2.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Training produced a non-finite loss or parameter value.
struct TrainingDivergence : std::runtime_error {
    explicit TrainingDivergence(const std::string& what) : std::runtime_error(what) {}
};

} // namespace finlstm
