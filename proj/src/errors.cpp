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

#include "safeplan/errors.hpp"

namespace safeplan
{

const char * to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::DegeneratePolytope:
      return "DegeneratePolytope";
    case ErrorCode::UnboundedPolytope:
      return "UnboundedPolytope";
    case ErrorCode::EmptyPolytope:
      return "EmptyPolytope";
    case ErrorCode::DimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange:
      return "IndexOutOfRange";
    case ErrorCode::UnstableGain:
      return "UnstableGain";
    case ErrorCode::HorizonTooLong:
      return "HorizonTooLong";
    case ErrorCode::ProjectionAmbiguous:
      return "ProjectionAmbiguous";
    case ErrorCode::NoFeasibleTrajectory:
      return "NoFeasibleTrajectory";
    case ErrorCode::SeedInsideObstacle:
      return "SeedInsideObstacle";
    case ErrorCode::UnstabilizablePair:
      return "UnstabilizablePair";
    case ErrorCode::InfeasibleMpc:
      return "InfeasibleMpc";
    case ErrorCode::ScenarioInvalid:
      return "ScenarioInvalid";
    case ErrorCode::InvalidArgument:
      return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string & message)
: std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

}  // namespace safeplan
