#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "isodelta/parameter.hpp"

namespace isodelta {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class NonFiniteInput : public Error {
public:
    using Error::Error;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

class NonConvergent : public Error {
public:
    using Error::Error;
};

/// Adjacent grid nodes between which a family denominator changes sign (or vanishes).
struct Bracket {
    std::size_t lo{};
    std::size_t hi{};
    double x_lo{};
    double x_hi{};
};

class SingularFamilyMember : public Error {
public:
    SingularFamilyMember(double C, std::vector<Bracket> brackets)
        : Error(describe(C, brackets)), C_(C), brackets_(std::move(brackets)) {}

    double C() const noexcept { return C_; }
    const std::vector<Bracket>& brackets() const noexcept { return brackets_; }

private:
    static std::string describe(double C, const std::vector<Bracket>& b) {
        std::string msg = "family member C=" + std::to_string(C) + " is singular on the grid";
        if (!b.empty())
            msg += " (first sign change in [" + std::to_string(b.front().x_lo) + ", " +
                   std::to_string(b.front().x_hi) + "], " + std::to_string(b.size()) +
                   " bracket(s))";
        return msg;
    }

    double C_;
    std::vector<Bracket> brackets_;
};

class ForbiddenParameter : public Error {
public:
    ForbiddenParameter(double C, ParameterClass cls)
        : Error("C=" + std::to_string(C) + " is not normalizable (" +
                std::string(to_string(cls)) + ")"),
          C_(C), cls_(cls) {}

    double C() const noexcept { return C_; }
    ParameterClass classification() const noexcept { return cls_; }

private:
    double C_;
    ParameterClass cls_;
};

/// Pointwise closed-form evaluation hit a pole.
class Singular : public Error {
public:
    explicit Singular(double x)
        : Error("denominator vanishes at x=" + std::to_string(x)), x_(x) {}
    double x() const noexcept { return x_; }

private:
    double x_;
};

class NoBoundState : public Error {
public:
    explicit NoBoundState(double lowest)
        : Error("no bound state: lowest eigenvalue " + std::to_string(lowest) +
                " is not below the continuum threshold"),
          lowest_(lowest) {}
    double lowest_eigenvalue() const noexcept { return lowest_; }

private:
    double lowest_;
};

}  // namespace isodelta
