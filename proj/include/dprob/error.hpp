#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dprob {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad parameters, malformed descriptors, out-of-domain arguments.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class OverflowError : public Error {
public:
    OverflowError(std::uint64_t n, std::uint64_t order)
        : Error("rising factorial overflow at (n=" + std::to_string(n) +
                ", N=" + std::to_string(order) + ")"),
          n_(n), order_(order) {}

    std::uint64_t n() const { return n_; }
    std::uint64_t order() const { return order_; }

private:
    std::uint64_t n_;
    std::uint64_t order_;
};

// A certified summation ran out of terms before its tail bound fell below
// tolerance.
class SeriesCapError : public Error {
public:
    SeriesCapError(double partial, double tail, std::uint64_t terms)
        : Error("series hit max_terms=" + std::to_string(terms) +
                " before certification (partial=" + std::to_string(partial) +
                ", tail=" + std::to_string(tail) + ")"),
          partial_(partial), tail_(tail) {}

    double partial() const { return partial_; }
    double tail() const { return tail_; }

private:
    double partial_;
    double tail_;
};

// The partial sums did not settle; the moment or series may be infinite.
class DivergenceError : public Error {
public:
    using Error::Error;
};

// A computation route does not apply to the given input (e.g. PGF route on
// signed support).
class UnsupportedRoute : public Error {
public:
    using Error::Error;
};

class NoFiniteBound : public Error {
public:
    using Error::Error;
};

// A hypothesis gate (e.g. random-walk convergence) rejected the run.
class GateError : public Error {
public:
    GateError(const std::string& what, double value, double threshold)
        : Error(what), value_(value), threshold_(threshold) {}

    double value() const { return value_; }
    double threshold() const { return threshold_; }

private:
    double value_;
    double threshold_;
};

}  // namespace dprob
