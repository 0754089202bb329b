// include/dynvoc/base.h

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

#ifndef DYNVOC_BASE_H_
#define DYNVOC_BASE_H_

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace dynvoc {

using Label = int32_t;
using StateId = int32_t;

inline constexpr Label kEpsilon = 0;
inline constexpr Label kNoLabel = -1;
inline constexpr StateId kNoStateId = -1;

// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// Malformed text input; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string &what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Weighted determinization exceeded its state budget (input probably
// violates the twins property).
class DeterminizeBudgetError : public Error {
 public:
  using Error::Error;
};

namespace internal {

inline void AppendAll(std::ostringstream &) {}

template <typename T, typename... Rest>
void AppendAll(std::ostringstream &os, T &&first, Rest &&...rest) {
  os << std::forward<T>(first);
  AppendAll(os, std::forward<Rest>(rest)...);
}

}  // namespace internal

template <typename... Args>
std::string StrCat(Args &&...args) {
  std::ostringstream os;
  internal::AppendAll(os, std::forward<Args>(args)...);
  return os.str();
}

template <typename... Args>
[[noreturn]] void Fail(Args &&...args) {
  throw Error(StrCat(std::forward<Args>(args)...));
}

}  // namespace dynvoc

#endif  // DYNVOC_BASE_H_
