// include/dynvoc/weight.h

// Copyright 2026 The dynvoc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DYNVOC_WEIGHT_H_
#define DYNVOC_WEIGHT_H_

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "dynvoc/base.h"

namespace dynvoc {

// Tropical semiring over negative log-probabilities (natural log units):
// Plus is min, Times is +, Zero is +inf, One is 0. Values are normally
// non-negative, but negative weights are representable (split language
// models redistribute unigram costs and may produce them).
class TropicalWeight {
 public:
  constexpr TropicalWeight() : value_(0.0) {}
  constexpr explicit TropicalWeight(double v) : value_(v) {}

  static constexpr TropicalWeight Zero() {
    return TropicalWeight(std::numeric_limits<double>::infinity());
  }
  static constexpr TropicalWeight One() { return TropicalWeight(0.0); }

  constexpr double Value() const { return value_; }
  bool IsZero() const { return std::isinf(value_) && value_ > 0; }
  bool Member() const { return !std::isnan(value_) && value_ != -std::numeric_limits<double>::infinity(); }

  friend constexpr bool operator==(TropicalWeight a, TropicalWeight b) {
    return a.value_ == b.value_;
  }
  friend constexpr bool operator!=(TropicalWeight a, TropicalWeight b) {
    return !(a == b);
  }

 private:
  double value_;
};

using Weight = TropicalWeight;

inline Weight Plus(Weight a, Weight b) {
  return a.Value() <= b.Value() ? a : b;
}

inline Weight Times(Weight a, Weight b) {
  if (a.IsZero() || b.IsZero()) return Weight::Zero();
  return Weight(a.Value() + b.Value());
}

// Left division: the c with Times(b, c) == a. Dividing by Zero is an error.
inline Weight Divide(Weight a, Weight b) {
  if (b.IsZero()) Fail("tropical division by Zero");
  if (a.IsZero()) return Weight::Zero();
  return Weight(a.Value() - b.Value());
}

// True when a <= b under the natural order of the semiring (a is "better").
inline bool NaturalLess(Weight a, Weight b) { return a.Value() < b.Value(); }

inline bool ApproxEqual(Weight a, Weight b, double delta = 1e-9) {
  if (a.IsZero() || b.IsZero()) return a.IsZero() && b.IsZero();
  return std::fabs(a.Value() - b.Value()) <= delta;
}

// Shortest decimal text that parses back to the identical double.
inline std::string WeightToString(Weight w) {
  if (w.IsZero()) return "Infinity";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), w.Value());
  return std::string(buf, res.ptr);
}

// Returns false on malformed text.
inline bool ParseWeight(std::string_view text, Weight *out) {
  if (text == "Infinity" || text == "inf" || text == "+inf") {
    *out = Weight::Zero();
    return true;
  }
  double v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return false;
  *out = Weight(v);
  return true;
}

inline std::ostream &operator<<(std::ostream &os, Weight w) {
  return os << WeightToString(w);
}

}  // namespace dynvoc

#endif  // DYNVOC_WEIGHT_H_
