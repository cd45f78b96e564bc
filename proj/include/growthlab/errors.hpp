#pragma once

#include <stdexcept>
#include <string>

namespace growthlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error { using Error::Error; };
class ParameterError : public Error { using Error::Error; };
class NoSignChangeError : public Error { using Error::Error; };
class IterationLimitError : public Error { using Error::Error; };
class DivergenceError : public Error { using Error::Error; };
class EmptyDomainError : public Error { using Error::Error; };
class RegionError : public Error { using Error::Error; };
class WindowOverflowError : public Error { using Error::Error; };
class BudgetExceededError : public Error { using Error::Error; };
class InsufficientSamplesError : public Error { using Error::Error; };
class PathError : public Error { using Error::Error; };

/// Raised by mc::run_replicas; carries the failing replica index.
class ReplicaError : public Error {
public:
    ReplicaError(std::size_t index, const std::string& what)
        : Error("replica " + std::to_string(index) + ": " + what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

} // namespace growthlab
