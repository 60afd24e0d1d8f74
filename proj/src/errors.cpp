#include "fsdp/errors.hpp"

#include <sstream>

namespace fsdp {

std::string format_vector(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  os << ')';
  return os.str();
}

InfeasibleState::InfeasibleState(int t, std::vector<double> x)
    : Error("state " + format_vector(x) + " leaves the state box at stage " + std::to_string(t)),
      stage(t),
      state(std::move(x)) {}

InfeasibleInput::InfeasibleInput(int t, std::vector<double> u)
    : Error("input " + format_vector(u) + " leaves the input box at stage " + std::to_string(t)),
      stage(t),
      input(std::move(u)) {}

EmptyFeasibleSet::EmptyFeasibleSet(int t, std::vector<double> x)
    : Error("no feasible input at stage " + std::to_string(t) + " from state " + format_vector(x)),
      stage(t),
      state(std::move(x)) {}

EnumerationTooLarge::EnumerationTooLarge(double sequences, double cap)
    : Error("enumeration of " + std::to_string(sequences) + " input sequences exceeds the cap of " +
            std::to_string(cap)) {}

NegativeTermError::NegativeTermError(std::size_t term, int t, double value)
    : Error("p-norm term " + std::to_string(term) + " is negative (" + std::to_string(value) +
            ") at stage " + std::to_string(t)) {}

BoundsTooTight::BoundsTooTight(int t, std::size_t coord, double value)
    : Error("augmented coordinate " + std::to_string(coord) + " reached " + std::to_string(value) +
            " outside its bounds at stage " + std::to_string(t)),
      stage(t),
      coordinate(coord) {}

ValidationFailed::ValidationFailed(double achieved, double target)
    : Error("compact cover escape probability " + std::to_string(achieved) + " exceeds " +
            std::to_string(target)),
      achieved_escape(achieved) {}

IndefiniteResidual::IndefiniteResidual(double min_eig)
    : Error("residual covariance M0 - M1 M0^-1 M1^T has eigenvalue " + std::to_string(min_eig)),
      min_eigenvalue(min_eig) {}

}  // namespace fsdp
