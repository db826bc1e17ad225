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

#pragma once

#include <string>
#include <vector>

namespace gfcs {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Numeric invariant suite: finite-difference gradient checks for each
// architecture preset, resize adjointness, DCT orthonormality, SVD
// reconstruction, the coimage rank bound and projection idempotence. Each
// path in `model_files` adds a load check and a gradient check for that model.
std::vector<CheckResult> run_selfcheck(const std::vector<std::string>& model_files = {});

}  // namespace gfcs
