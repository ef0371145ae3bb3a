#pragma once

#include <stdexcept>
#include <string>

namespace p2ab {

// Root of every error the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input outside an operation's domain (bad modulus, even n, gamma >= 1/2 ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// A configured budget (memory, scan range, factoring effort, feasibility bound) was exceeded.
class ResourceError : public Error {
public:
    using Error::Error;
};

// A factorization ran out of effort with a composite cofactor left over.
class IncompleteFactorization : public ResourceError {
public:
    IncompleteFactorization(const std::string& what, std::string cofactor)
        : ResourceError(what + " (unfactored cofactor " + cofactor + ")"), cofactor_(std::move(cofactor)) {}

    const std::string& cofactor() const noexcept { return cofactor_; }

private:
    std::string cofactor_;
};

// The requested parameters cannot be realized (not enough primes below u, ...).
class FeasibilityError : public Error {
public:
    using Error::Error;
};

// Derived-mode parameters requested for an x outside the construction's regime.
class RegimeError : public Error {
public:
    using Error::Error;
};

// An internal invariant failed. Signals a bug or a tampered input, never a user mistake.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

}  // namespace p2ab
