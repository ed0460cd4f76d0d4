#pragma once

#include <stdexcept>
#include <string>

namespace plimit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad sizes, bad parameters).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Mesh construction or mesh topology failure.
class MeshError : public Error {
 public:
  using Error::Error;
};

/// Newton solver hit max_iter before reaching the residual tolerance.
class NonConvergence : public Error {
 public:
  NonConvergence(double residual, int iterations, const std::string& what);
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Dykstra projection hit its cycle cap with constraints still violated.
class MaxIterations : public Error {
 public:
  MaxIterations(double worst_violation, int cycles,
                const std::string& context = "projection");
  double worst_violation() const { return worst_violation_; }
  int cycles() const { return cycles_; }

 private:
  double worst_violation_;
  int cycles_;
};

/// Transport data whose positive and negative parts do not balance.
class UnbalancedMasses : public Error {
 public:
  explicit UnbalancedMasses(double excess);
  double excess() const { return excess_; }

 private:
  double excess_;
};

/// The transport solver could not certify optimality to the required gap.
class InfeasibleTolerance : public Error {
 public:
  InfeasibleTolerance(double gap, double required);
  double gap() const { return gap_; }

 private:
  double gap_;
};

}  // namespace plimit
