#include "nfgcover/error.hpp"

namespace nfgcover {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidTensor: return "invalid-tensor";
    case ErrorKind::InvalidGraph: return "invalid-graph";
    case ErrorKind::MissingEdgeAssignment: return "missing-edge-assignment";
    case ErrorKind::EnumerationCapExceeded: return "enumeration-cap-exceeded";
    case ErrorKind::WrongArity: return "wrong-arity";
    case ErrorKind::WrongCardinality: return "wrong-cardinality";
    case ErrorKind::NonBinaryAlphabet: return "non-binary-alphabet";
    case ErrorKind::HalfEdgePresent: return "half-edge-present";
    case ErrorKind::MalformedPermutation: return "malformed-permutation";
    case ErrorKind::WrongM: return "wrong-M";
    case ErrorKind::NotAnMdc: return "not-an-mdc";
    case ErrorKind::NegativePartitionSum: return "negative-partition-sum";
    case ErrorKind::NotLogSupermodular: return "not-log-supermodular";
    case ErrorKind::ClassViolation: return "class-violation";
    case ErrorKind::SignedGraphUnsupported: return "signed-graph-unsupported";
    case ErrorKind::NotConverged: return "not-converged";
    case ErrorKind::ZeroSupportBelief: return "zero-support-belief";
    case ErrorKind::RejectionBudgetExhausted: return "rejection-budget-exhausted";
    case ErrorKind::UnrealizableTopology: return "unrealizable-topology";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what),
      kind_(kind) {}

}  // namespace nfgcover
