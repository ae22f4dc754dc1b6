#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace viewdir {

enum class ErrorCode {
  // scene model
  DuplicateId,
  TooFewViews,
  DegenerateCenter,
  UnknownView,
  InvalidCamera,
  InvalidMesh,
  // metrics / samplers
  NotUnit,
  EmptyCovisibility,
  InvalidSpec,
  BudgetExceedsPool,
  TooFewSelected,
  ScheduleExhaustsPool,
  DrawExceedsPool,
  NotOnSphere,
  DegenerateHull,
  PoolExhausted,
  // coverage
  EmptyMesh,
  MissingIntrinsics,
  SampleMismatch,
  // evaluator
  EvaluatorFailure,
  SpawnFailure,
  Timeout,
  MalformedResponse,
  IncompleteScores,
  // io
  ParseError,
  NonOrthonormalRotation,
  MissingFile,
  IoError,
  SchemaVersionMismatch,
  // cli
  InvalidConfig,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace viewdir
