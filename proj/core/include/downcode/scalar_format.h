//
// Copyright 2026 The Downcode Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DOWNCODE_SCALAR_FORMAT_H_
#define DOWNCODE_SCALAR_FORMAT_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace downcode {

// Shortest decimal that parses back to the identical binary64 value.
std::string FormatScalar(double v);

// Strict parse of the whole string; rejects trailing garbage and non-finite
// values.
absl::StatusOr<double> ParseScalar(std::string_view text);

}  // namespace downcode

#endif  // DOWNCODE_SCALAR_FORMAT_H_
