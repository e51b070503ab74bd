#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace lowrank {

/// Violated operation precondition (asymmetric input, non-descending spectrum, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// An internal iteration failed to converge, or a matrix was numerically
/// rank deficient where full rank was required.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the solver loops when the iterate norm crosses the divergence
/// guard. The concrete `DivergedRun<TraceT>` carries the partial trace.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : std::runtime_error(what), iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

template <typename TraceT>
class DivergedRun : public DivergenceError {
 public:
  DivergedRun(const std::string& what, std::size_t iteration, TraceT trace)
      : DivergenceError(what, iteration), trace_(std::move(trace)) {}

  const TraceT& trace() const noexcept { return trace_; }

 private:
  TraceT trace_;
};

}  // namespace lowrank
