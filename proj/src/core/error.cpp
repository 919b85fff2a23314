#include "bnet/error.hpp"

namespace bnet {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::CycleError: return "CycleError";
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::OverlapError: return "OverlapError";
    case ErrorKind::IncompleteAssignment: return "IncompleteAssignment";
    case ErrorKind::EmptyData: return "EmptyData";
    case ErrorKind::ConstraintUnsatisfiable: return "ConstraintUnsatisfiable";
    case ErrorKind::VarInEvidence: return "VarInEvidence";
    case ErrorKind::ImpossibleEvidence: return "ImpossibleEvidence";
    case ErrorKind::RaggedRow: return "RaggedRow";
    case ErrorKind::UnknownStateLabel: return "UnknownStateLabel";
    case ErrorKind::EmptyTable: return "EmptyTable";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::UnsortedEdges: return "UnsortedEdges";
    case ErrorKind::DegenerateClass: return "DegenerateClass";
    case ErrorKind::TooFewMinority: return "TooFewMinority";
    case ErrorKind::NonBinaryLabel: return "NonBinaryLabel";
    case ErrorKind::SingleClassTrain: return "SingleClassTrain";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::SingleClassLabels: return "SingleClassLabels";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::UnknownState: return "UnknownState";
    case ErrorKind::ValueOutOfRange: return "ValueOutOfRange";
  }
  return "Unknown";
}

}  // namespace bnet
