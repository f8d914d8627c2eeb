#pragma once

#include <stdexcept>
#include <string>

namespace anisoflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fields or grids that do not share a shape.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation (e.g. p < 1).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Model input violating one of the standing assumptions (A0)-(A3).
class ValidationError : public Error {
public:
    ValidationError(std::string assumption, const std::string& what)
        : Error(assumption.empty() ? what : "(" + assumption + ") " + what),
          assumption_(std::move(assumption)) {}

    const std::string& assumption() const noexcept { return assumption_; }

private:
    std::string assumption_;
};

/// An iterative solve stopped before reaching its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double res_alpha, double res_u)
        : Error(what), res_alpha_(res_alpha), res_u_(res_u) {}

    double res_alpha() const noexcept { return res_alpha_; }
    double res_u() const noexcept { return res_u_; }

private:
    double res_alpha_;
    double res_u_;
};

/// NaN/Inf encountered, or a hard numerical invariant (0 <= u <= 1) broken.
class NumericError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace anisoflow
