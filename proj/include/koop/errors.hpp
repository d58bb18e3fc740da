#pragma once

#include <stdexcept>
#include <string>

namespace koop {

/// A trajectory left its chart by more than the allowed margin.
class DomainExitError : public std::runtime_error {
public:
  explicit DomainExitError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative scheme hit its iteration cap before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// A sampled precondition (e.g. the resolvent Lipschitz check) failed.
class PreconditionError : public std::invalid_argument {
public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Point-map recovery found two well-separated candidates matching equally well.
class AmbiguousMatchError : public std::runtime_error {
public:
  explicit AmbiguousMatchError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace koop
