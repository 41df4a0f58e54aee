#pragma once

#include <stdexcept>
#include <string>

namespace spearlens {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: malformed manifest, out-of-range parameter, degenerate sample.
// The CLI maps this to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

// An iterative solver exhausted its budget. The CLI maps this to exit code 3.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace spearlens
