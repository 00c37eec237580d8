#pragma once

#include <stdexcept>
#include <string>

namespace dmc {

//! Bad arguments or degenerate input data. Maps to CLI exit code 2.
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

//! A numerical procedure failed to converge. Maps to CLI exit code 3.
class numerical_error : public std::runtime_error {
public:
    numerical_error(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    //! Residual achieved when the procedure gave up (e.g. the remaining
    //! off-diagonal norm of a Jacobi sweep).
    double residual() const noexcept { return residual_; }

private:
    double residual_ = 0.0;
};

//! File read/write or parse failure. Maps to CLI exit code 4.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dmc
