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

#include "crowdmech/rational.h"

#include <charconv>
#include <string>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/strip.h"

namespace crowdmech {
namespace {

absl::StatusOr<int64_t> ParseInt(absl::string_view text) {
  int64_t value = 0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("not an integer: '", text, "'"));
  }
  return value;
}

}  // namespace

absl::StatusOr<Rational> ParseRational(absl::string_view text) {
  text = absl::StripAsciiWhitespace(text);
  if (text.empty()) return absl::InvalidArgumentError("empty number");

  if (auto slash = text.find('/'); slash != absl::string_view::npos) {
    auto num = ParseInt(text.substr(0, slash));
    auto den = ParseInt(text.substr(slash + 1));
    if (!num.ok()) return num.status();
    if (!den.ok()) return den.status();
    if (*den == 0) return absl::InvalidArgumentError("zero denominator");
    return Rational(*num, *den);
  }

  bool negative = false;
  absl::string_view digits = text;
  if (digits.front() == '-' || digits.front() == '+') {
    negative = digits.front() == '-';
    digits.remove_prefix(1);
  }
  absl::string_view whole = digits;
  absl::string_view frac;
  if (auto dot = digits.find('.'); dot != absl::string_view::npos) {
    whole = digits.substr(0, dot);
    frac = digits.substr(dot + 1);
  }
  if ((whole.empty() && frac.empty()) ||
      (!whole.empty() && (whole.front() == '-' || whole.front() == '+'))) {
    return absl::InvalidArgumentError(
        absl::StrCat("not a number: '", text, "'"));
  }
  if (frac.size() > 15) {
    return absl::InvalidArgumentError(
        absl::StrCat("too many decimal places: '", text, "'"));
  }
  int64_t w = 0;
  if (!whole.empty()) {
    auto parsed = ParseInt(whole);
    if (!parsed.ok()) return parsed.status();
    w = *parsed;
  }
  int64_t f = 0;
  int64_t scale = 1;
  if (!frac.empty()) {
    auto parsed = ParseInt(frac);
    if (!parsed.ok() || *parsed < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("not a number: '", text, "'"));
    }
    f = *parsed;
    for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
  }
  Rational value = Rational(w) + Rational(f, scale);
  return negative ? -value : value;
}

std::string FormatRational(const Rational& value) {
  if (value.denominator() == 1) return absl::StrCat(value.numerator());
  return absl::StrCat(value.numerator(), "/", value.denominator());
}

double ToDouble(const Rational& value) {
  return boost::rational_cast<double>(value);
}

int64_t Floor(const Rational& value) {
  int64_t q = value.numerator() / value.denominator();
  if (value.numerator() < 0 && q * value.denominator() != value.numerator()) {
    --q;
  }
  return q;
}

int64_t Ceil(const Rational& value) {
  int64_t f = Floor(value);
  return Rational(f) == value ? f : f + 1;
}

}  // namespace crowdmech
