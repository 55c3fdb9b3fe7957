#pragma once

#include <stdexcept>
#include <string>

namespace combnoise {

// Input outside the physical or mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A numerical procedure failed (no bracket, non-convergence, non-finite result).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Caller violated an API contract (mismatched dimensions, inconsistent objects).
class ContractError : public std::invalid_argument {
public:
    explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace combnoise
