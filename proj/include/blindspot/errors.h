/*
 * Copyright 2026 The Blindspot Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BLINDSPOT_ERRORS_H_
#define BLINDSPOT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace blindspot {

// A caller violated an operation's precondition (bad threshold, schema
// mismatch, negative weight, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data could not be read or parsed (malformed rows, missing columns,
// unreadable files).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal consistency check failed. Seeing one of these is a bug.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace blindspot

#endif  // BLINDSPOT_ERRORS_H_
