#include "viewdir/error.hpp"

namespace viewdir {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::TooFewViews: return "TooFewViews";
    case ErrorCode::DegenerateCenter: return "DegenerateCenter";
    case ErrorCode::UnknownView: return "UnknownView";
    case ErrorCode::InvalidCamera: return "InvalidCamera";
    case ErrorCode::InvalidMesh: return "InvalidMesh";
    case ErrorCode::NotUnit: return "NotUnit";
    case ErrorCode::EmptyCovisibility: return "EmptyCovisibility";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::BudgetExceedsPool: return "BudgetExceedsPool";
    case ErrorCode::TooFewSelected: return "TooFewSelected";
    case ErrorCode::ScheduleExhaustsPool: return "ScheduleExhaustsPool";
    case ErrorCode::DrawExceedsPool: return "DrawExceedsPool";
    case ErrorCode::NotOnSphere: return "NotOnSphere";
    case ErrorCode::DegenerateHull: return "DegenerateHull";
    case ErrorCode::PoolExhausted: return "PoolExhausted";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::MissingIntrinsics: return "MissingIntrinsics";
    case ErrorCode::SampleMismatch: return "SampleMismatch";
    case ErrorCode::EvaluatorFailure: return "EvaluatorFailure";
    case ErrorCode::SpawnFailure: return "SpawnFailure";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::IncompleteScores: return "IncompleteScores";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonOrthonormalRotation: return "NonOrthonormalRotation";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace viewdir
