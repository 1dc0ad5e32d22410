// Copyright 2026 The safeplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SAFEPLAN__ERRORS_HPP_
#define SAFEPLAN__ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace safeplan
{

enum class ErrorCode {
  DegeneratePolytope,
  UnboundedPolytope,
  EmptyPolytope,
  DimensionMismatch,
  IndexOutOfRange,
  UnstableGain,
  HorizonTooLong,
  ProjectionAmbiguous,
  NoFeasibleTrajectory,
  SeedInsideObstacle,
  UnstabilizablePair,
  InfeasibleMpc,
  ScenarioInvalid,
  InvalidArgument,
};

const char * to_string(ErrorCode code);

/// Single exception type for the library; callers dispatch on `code()`.
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string & message);

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace safeplan

#endif  // SAFEPLAN__ERRORS_HPP_
