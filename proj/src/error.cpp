/*
 * Copyright 2026 The gfcs Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gfcs/error.hpp"

namespace gfcs {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::Io: return "io";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::UnsupportedVersion: return "unsupported-version";
    case ErrorCode::NumericalFailure: return "numerical-failure";
    case ErrorCode::TrainingFailure: return "training-failure";
    case ErrorCode::EmptySelection: return "empty-selection";
    case ErrorCode::Shortfall: return "shortfall";
    case ErrorCode::DegenerateDirection: return "degenerate-direction";
    case ErrorCode::Exhausted: return "exhausted";
    case ErrorCode::BudgetExceeded: return "budget-exceeded";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace gfcs
