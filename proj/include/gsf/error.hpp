#pragma once

#include <stdexcept>
#include <string>

namespace gsf {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: malformed config, wrong arity, invalid parameters.
class InputError : public Error {
public:
    using Error::Error;
};

// A per-epsilon evaluation failed (domain violation, non-finite value).
class EvalError : public Error {
public:
    EvalError(const std::string& what, double eps)
        : Error(what + " (eps=" + std::to_string(eps) + ")"), eps_(eps) {}
    explicit EvalError(const std::string& what) : Error(what), eps_(0.0) {}
    double eps() const { return eps_; }

private:
    double eps_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double partial)
        : Error(what), partial_(partial) {}
    double partial() const { return partial_; }

private:
    double partial_;
};

} // namespace gsf
