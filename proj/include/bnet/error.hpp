#pragma once

#include <stdexcept>
#include <string>

namespace bnet {

// Numeric values are part of the C ABI (see bnet.h); append only.
enum class ErrorKind : int {
  InvalidArgument = 1,
  Io = 2,
  Parse = 3,
  CycleError = 4,
  DuplicateEdge = 5,
  OverlapError = 6,
  IncompleteAssignment = 7,
  EmptyData = 8,
  ConstraintUnsatisfiable = 9,
  VarInEvidence = 10,
  ImpossibleEvidence = 11,
  RaggedRow = 12,
  UnknownStateLabel = 13,
  EmptyTable = 14,
  MissingColumn = 15,
  UnsortedEdges = 16,
  DegenerateClass = 17,
  TooFewMinority = 18,
  NonBinaryLabel = 19,
  SingleClassTrain = 20,
  SchemaMismatch = 21,
  SingleClassLabels = 22,
  UnknownVariable = 23,
  UnknownState = 24,
  ValueOutOfRange = 25,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace bnet
