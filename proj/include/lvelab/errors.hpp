#pragma once

#include <stdexcept>
#include <string>

namespace lvelab {

/// Base class for every error raised by the library. `kind()` is the stable
/// machine-readable tag used in CLI error records.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// A precondition on the arguments was violated.
class ContractViolation : public Error {
public:
    explicit ContractViolation(const std::string& what) : Error("contract_violation", what) {}
};

/// A request exceeded a configured enumeration or size cap.
class ResourceLimit : public Error {
public:
    ResourceLimit(const std::string& what, long long cap)
        : Error("resource_limit", what + " (cap " + std::to_string(cap) + ")"), cap_(cap) {}

    long long cap() const noexcept { return cap_; }

private:
    long long cap_;
};

/// A numerical integration finished without reaching its tolerance. The
/// best estimate reached is kept so callers can still report it.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double estimate, double achieved_error)
        : Error("accuracy", what), estimate_(estimate), error_(achieved_error) {}

    double estimate() const noexcept { return estimate_; }
    double achieved_error() const noexcept { return error_; }

private:
    double estimate_;
    double error_;
};

class InvalidPairing : public Error {
public:
    explicit InvalidPairing(const std::string& what) : Error("invalid_pairing", what) {}
};

/// Raised when a series carries a power of N that no ribbon graph can produce.
class StructureViolation : public Error {
public:
    explicit StructureViolation(const std::string& what) : Error("structure_violation", what) {}
};

class NotImplemented : public Error {
public:
    explicit NotImplemented(const std::string& what) : Error("not_implemented", what) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("domain", what) {}
};

class DegenerateFit : public Error {
public:
    explicit DegenerateFit(const std::string& what) : Error("degenerate_fit", what) {}
};

}  // namespace lvelab
