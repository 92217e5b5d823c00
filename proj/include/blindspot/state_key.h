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

#ifndef BLINDSPOT_STATE_KEY_H_
#define BLINDSPOT_STATE_KEY_H_

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace blindspot {

// One operational state: an ordered tuple of (factor name, categorical value)
// pairs, e.g. (activity=walking, tilt=2, energy=0).
//
// Keys order lexicographically by their factor values, then by factor names.
// Values may not contain '|' (the serialization separator) or control
// characters.
class StateKey {
 public:
  using Factor = std::pair<std::string, std::string>;

  // Throws InvalidArgument on an empty factor list, duplicate factor names,
  // an empty name, or a value containing a reserved character.
  explicit StateKey(std::vector<Factor> factors);

  // Convenience for single-factor keys.
  StateKey(std::string name, std::string value);

  const std::vector<Factor>& factors() const { return factors_; }
  size_t size() const { return factors_.size(); }

  std::vector<std::string> names() const;
  std::optional<std::string_view> value(std::string_view name) const;

  // True when the factor names equal `schema` element-wise.
  bool Conforms(std::span<const std::string> schema) const;

  // Keeps only the factors named in `names`, in that order. Throws
  // InvalidArgument if a name is absent.
  StateKey Project(std::span<const std::string> names) const;

  // Factor values joined by '|'. Names are implied by the table schema.
  std::string ToString() const;

  // Inverse of ToString() for a given schema.
  static StateKey Parse(std::string_view text,
                        std::span<const std::string> schema);

  friend bool operator==(const StateKey&, const StateKey&) = default;
  friend std::strong_ordering operator<=>(const StateKey& a,
                                          const StateKey& b);

 private:
  std::vector<Factor> factors_;
};

// Throws InvalidArgument unless `schema` is a non-empty list of unique,
// non-empty factor names.
void ValidateSchema(std::span<const std::string> schema);

// Returns true when `value` is a legal factor value.
bool IsValidFactorValue(std::string_view value);

}  // namespace blindspot

#endif  // BLINDSPOT_STATE_KEY_H_
