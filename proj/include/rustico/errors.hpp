#ifndef RUSTICO_ERRORS_HPP
#define RUSTICO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rustico {

// Filter configuration found no usable keypoints or was fed an unusable prototype.
class ConfigureError : public std::runtime_error {
public:
    explicit ConfigureError(const std::string& msg) : std::runtime_error(msg) {}
};

// File could not be read, parsed or written.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Metric computation was asked for something undefined (mismatched sizes, empty ground truth).
class EvalError : public std::runtime_error {
public:
    explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace rustico

#endif
