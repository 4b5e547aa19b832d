#pragma once

#include <stdexcept>
#include <string>

namespace dcesync {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutOfRangeError : public Error {
public:
    using Error::Error;
};

class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

/// Population leaked into the top of the Fock ladder beyond the allowed tolerance.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, double time, double leakage)
        : Error(what), time_(time), leakage_(leakage) {}
    double time() const noexcept { return time_; }
    double leakage() const noexcept { return leakage_; }

private:
    double time_;
    double leakage_;
};

/// Non-finite amplitudes appeared during integration.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double time, double dt)
        : Error(what), time_(time), dt_(dt) {}
    double time() const noexcept { return time_; }
    double dt() const noexcept { return dt_; }

private:
    double time_;
    double dt_;
};

/// Zero-variance window in a correlation estimate.
class UndefinedCorrelationError : public Error {
public:
    using Error::Error;
};

/// Closed-form coefficient extraction failed (singular or degenerate system).
class ExtractionError : public Error {
public:
    using Error::Error;
};

/// Cutoff refinement hit the caller's bound before the observables settled.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace dcesync
