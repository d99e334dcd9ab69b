#pragma once

#include <stdexcept>
#include <string>

namespace coagem {

/// Thrown when a rate denominator (interaction mass or total mass) has
/// vanished below the exhaustion threshold and the kinetic right-hand side
/// is no longer defined.
class DivisionByExhaustion : public std::runtime_error {
public:
  explicit DivisionByExhaustion(const std::string& what)
      : std::runtime_error(what) {}
};

class InvalidInitialDistribution : public std::invalid_argument {
public:
  explicit InvalidInitialDistribution(const std::string& what)
      : std::invalid_argument(what) {}
};

/// Evaluation outside the time window on which a closed form is defined
/// (typically past the point where the total mass reaches zero).
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

class QuadratureFailure : public std::runtime_error {
public:
  explicit QuadratureFailure(const std::string& what)
      : std::runtime_error(what) {}
};

/// Second-moment blow-up detected while integrating the moment hierarchy.
class GelationReached : public std::runtime_error {
public:
  explicit GelationReached(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace coagem
