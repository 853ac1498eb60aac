#pragma once

#include <stdexcept>
#include <string>

namespace recnego {

/// Bad value passed to an operation (dimension mismatch, negative count, ...).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed input data; message names the offending row/column.
class IngestionError : public std::runtime_error {
public:
    explicit IngestionError(const std::string& what) : std::runtime_error(what) {}
};

/// Requested battery dispatch would violate the SOC window.
/// Carries the feasible dispatch range (kW) for the rejected step.
class DispatchError : public std::runtime_error {
public:
    DispatchError(const std::string& what, double feasible_min_kw, double feasible_max_kw)
        : std::runtime_error(what), feasible_min_kw(feasible_min_kw), feasible_max_kw(feasible_max_kw) {}

    double feasible_min_kw;
    double feasible_max_kw;
};

/// Contract violates the physical link constraint.
class ContractError : public std::runtime_error {
public:
    explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

/// Operation invoked on an object in an unusable state (empty space, no candidates).
class StateError : public std::logic_error {
public:
    explicit StateError(const std::string& what) : std::logic_error(what) {}
};

/// Negotiation protocol violation (offer outside the shared domain, mismatched domains).
class ProtocolError : public std::runtime_error {
public:
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

/// Failure while writing run artifacts.
class ExportError : public std::runtime_error {
public:
    explicit ExportError(const std::string& what) : std::runtime_error(what) {}
};

/// Unusable run configuration file (missing, unparsable or inconsistent).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace recnego
