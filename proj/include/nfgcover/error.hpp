#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nfgcover {

enum class ErrorKind {
  InvalidTensor,
  InvalidGraph,
  MissingEdgeAssignment,
  EnumerationCapExceeded,
  WrongArity,
  WrongCardinality,
  NonBinaryAlphabet,
  HalfEdgePresent,
  MalformedPermutation,
  WrongM,
  NotAnMdc,
  NegativePartitionSum,
  NotLogSupermodular,
  ClassViolation,
  SignedGraphUnsupported,
  NotConverged,
  ZeroSupportBelief,
  RejectionBudgetExhausted,
  UnrealizableTopology,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the ErrorKind codes so
/// callers (and the CLI) can branch on the category without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nfgcover
