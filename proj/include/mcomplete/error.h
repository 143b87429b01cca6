// Copyright 2026 The mcomplete Authors. All Rights Reserved.
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

#ifndef MCOMPLETE_ERROR_H_
#define MCOMPLETE_ERROR_H_

#include <stdexcept>
#include <string>

namespace mcomplete {

// Precondition violations (bad dimensions, ranks, flags) are reported with
// std::invalid_argument. The two types below cover the remaining failure
// classes that callers, in particular the CLI, need to tell apart.

// Malformed or unreadable input data.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure could not produce a usable result (rank-deficient
// frame, stalled line search treated as fatal, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace mcomplete

#endif  // MCOMPLETE_ERROR_H_
