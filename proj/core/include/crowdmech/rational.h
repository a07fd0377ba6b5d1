// Copyright 2026 The crowdmech Authors.
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

#ifndef CROWDMECH_RATIONAL_H_
#define CROWDMECH_RATIONAL_H_

#include <cstdint>
#include <string>
#include "absl/strings/string_view.h"

#include "absl/status/statusor.h"
#include "boost/rational.hpp"

namespace crowdmech {

// Exact currency and ratio arithmetic. Threshold tests such as
// c <= (B / delta) * h / (h(S) + h) are frequently tight, so every
// mechanism compares values without rounding.
using Rational = boost::rational<int64_t>;

// Accepts "7", "-3", "2.25", "7/2".
absl::StatusOr<Rational> ParseRational(absl::string_view text);

// "7/2" or "3".
std::string FormatRational(const Rational& value);

double ToDouble(const Rational& value);

// Largest integer <= value.
int64_t Floor(const Rational& value);
// Smallest integer >= value.
int64_t Ceil(const Rational& value);

}  // namespace crowdmech

#endif  // CROWDMECH_RATIONAL_H_
