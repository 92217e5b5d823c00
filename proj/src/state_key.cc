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

#include "blindspot/state_key.h"

#include <algorithm>
#include <set>

#include "blindspot/errors.h"

namespace blindspot {

bool IsValidFactorValue(std::string_view value) {
  return std::none_of(value.begin(), value.end(), [](char c) {
    return c == '|' || static_cast<unsigned char>(c) < 0x20;
  });
}

void ValidateSchema(std::span<const std::string> schema) {
  if (schema.empty()) throw InvalidArgument("schema has no factors");
  std::set<std::string_view> seen;
  for (const auto& name : schema) {
    if (name.empty()) throw InvalidArgument("schema has an empty factor name");
    if (!seen.insert(name).second) {
      throw InvalidArgument("duplicate factor name in schema: " + name);
    }
  }
}

StateKey::StateKey(std::vector<Factor> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw InvalidArgument("state key has no factors");
  std::set<std::string_view> seen;
  for (const auto& [name, value] : factors_) {
    if (name.empty() || !IsValidFactorValue(name)) {
      throw InvalidArgument("invalid factor name '" + name + "'");
    }
    if (!seen.insert(name).second) {
      throw InvalidArgument("duplicate factor name in state key: " + name);
    }
    if (!IsValidFactorValue(value)) {
      throw InvalidArgument("factor '" + name +
                            "' has a value with a reserved character");
    }
  }
}

StateKey::StateKey(std::string name, std::string value)
    : StateKey(std::vector<Factor>{{std::move(name), std::move(value)}}) {}

std::vector<std::string> StateKey::names() const {
  std::vector<std::string> out;
  out.reserve(factors_.size());
  for (const auto& f : factors_) out.push_back(f.first);
  return out;
}

std::optional<std::string_view> StateKey::value(std::string_view name) const {
  for (const auto& [n, v] : factors_) {
    if (n == name) return v;
  }
  return std::nullopt;
}

bool StateKey::Conforms(std::span<const std::string> schema) const {
  if (schema.size() != factors_.size()) return false;
  for (size_t i = 0; i < schema.size(); ++i) {
    if (factors_[i].first != schema[i]) return false;
  }
  return true;
}

StateKey StateKey::Project(std::span<const std::string> names) const {
  std::vector<Factor> kept;
  kept.reserve(names.size());
  for (const auto& name : names) {
    auto v = value(name);
    if (!v) throw InvalidArgument("state key has no factor '" + name + "'");
    kept.emplace_back(name, std::string(*v));
  }
  return StateKey(std::move(kept));
}

std::string StateKey::ToString() const {
  std::string out;
  for (size_t i = 0; i < factors_.size(); ++i) {
    if (i > 0) out += '|';
    out += factors_[i].second;
  }
  return out;
}

StateKey StateKey::Parse(std::string_view text,
                         std::span<const std::string> schema) {
  ValidateSchema(schema);
  std::vector<Factor> factors;
  size_t begin = 0;
  for (size_t i = 0; i < schema.size(); ++i) {
    size_t end = text.find('|', begin);
    bool last = i + 1 == schema.size();
    if (last != (end == std::string_view::npos)) {
      throw InvalidArgument("state '" + std::string(text) + "' does not have " +
                            std::to_string(schema.size()) + " factor values");
    }
    if (last) end = text.size();
    factors.emplace_back(schema[i], std::string(text.substr(begin, end - begin)));
    begin = end + 1;
  }
  return StateKey(std::move(factors));
}

std::strong_ordering operator<=>(const StateKey& a, const StateKey& b) {
  const size_t common = std::min(a.factors_.size(), b.factors_.size());
  for (size_t i = 0; i < common; ++i) {
    if (auto c = a.factors_[i].second <=> b.factors_[i].second; c != 0) return c;
  }
  if (auto c = a.factors_.size() <=> b.factors_.size(); c != 0) return c;
  for (size_t i = 0; i < common; ++i) {
    if (auto c = a.factors_[i].first <=> b.factors_[i].first; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

}  // namespace blindspot
