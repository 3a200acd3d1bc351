#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gridtwin {

/// Base of every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (network document, measurements).
class DataError : public Error {
public:
    using Error::Error;
};

/// Bad command-line usage or configuration values.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Topology that leaves nothing to analyse (e.g. every bus islanded).
class TopologyError : public Error {
public:
    explicit TopologyError(const std::string& what, std::vector<int> islanded = {})
        : Error(what), islanded_(std::move(islanded)) {}

    const std::vector<int>& islanded_buses() const noexcept { return islanded_; }

private:
    std::vector<int> islanded_;
};

class PowerFlowError : public Error {
public:
    using Error::Error;
};

/// Newton-Raphson ran out of iterations or blew up.
class DivergedError : public PowerFlowError {
public:
    DivergedError(const std::string& what, int iterations, double last_mismatch)
        : PowerFlowError(what), iterations_(iterations), last_mismatch_(last_mismatch) {}

    int iterations() const noexcept { return iterations_; }
    double last_mismatch() const noexcept { return last_mismatch_; }

private:
    int iterations_;
    double last_mismatch_;
};

class SingularJacobianError : public PowerFlowError {
public:
    using PowerFlowError::PowerFlowError;
};

/// Redispatch problem could not be assembled (missing data, no generators).
class ProblemError : public Error {
public:
    using Error::Error;
};

}  // namespace gridtwin
