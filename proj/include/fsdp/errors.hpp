#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fsdp {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InfeasibleState : public Error {
 public:
  InfeasibleState(int t, std::vector<double> x);
  int stage;
  std::vector<double> state;
};

class InfeasibleInput : public Error {
 public:
  InfeasibleInput(int t, std::vector<double> u);
  int stage;
  std::vector<double> input;
};

class EmptyFeasibleSet : public Error {
 public:
  EmptyFeasibleSet(int t, std::vector<double> x);
  int stage;
  std::vector<double> state;
};

class EnumerationTooLarge : public Error {
 public:
  EnumerationTooLarge(double sequences, double cap);
};

class NoFeasibleSequence : public Error {
 public:
  using Error::Error;
};

class HorizonMismatch : public Error {
 public:
  using Error::Error;
};

class NegativeTermError : public Error {
 public:
  NegativeTermError(std::size_t term, int t, double value);
};

class BoundsTooTight : public Error {
 public:
  BoundsTooTight(int t, std::size_t coordinate, double value);
  int stage;
  std::size_t coordinate;
};

class OutOfBox : public Error {
 public:
  using Error::Error;
};

class ValidationFailed : public Error {
 public:
  ValidationFailed(double achieved, double target);
  double achieved_escape;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class NonRectangular : public Error {
 public:
  using Error::Error;
};

class SingularCorrelation : public Error {
 public:
  using Error::Error;
};

class IndefiniteResidual : public Error {
 public:
  IndefiniteResidual(double min_eigenvalue);
  double min_eigenvalue;
};

std::string format_vector(const std::vector<double>& v);

}  // namespace fsdp
