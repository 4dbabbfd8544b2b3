#pragma once

#include <stdexcept>
#include <string>

namespace wdeloc {

/// Every failure the library reports, tagged by the violated contract.
enum class ErrorKind {
  // state invariants
  NonHermitian,
  TraceNotOne,
  NotPositiveSemidefinite,
  NotNormalized,
  WeightsNotNormalized,
  DimensionMismatch,
  // argument contracts
  KOutOfRange,
  IndexOutOfRange,
  EqualIndices,
  PurityOutOfRange,
  RankOutOfRange,
  BlockTooLarge,
  InsufficientSamples,
  InfeasiblePurity,
  NegativeFrequency,
  ZeroFrequency,
  MalformedInput,
  // numerical failures
  PositivityViolation,
};

const char* to_string(ErrorKind kind);

/// True for kinds that indicate an invalid quantum state (CLI exit 3),
/// as opposed to bad arguments/input (exit 2) or numerics (exit 4).
bool is_state_invariant(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, double magnitude = 0.0)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        magnitude_(magnitude) {}

  ErrorKind kind() const { return kind_; }

  /// Measured size of the violation (0 when not meaningful).
  double magnitude() const { return magnitude_; }

 private:
  ErrorKind kind_;
  double magnitude_;
};

}  // namespace wdeloc
