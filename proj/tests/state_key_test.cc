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

#include <gtest/gtest.h>

#include <map>

#include "blindspot/errors.h"

namespace blindspot {
namespace {

using F = std::vector<StateKey::Factor>;

TEST(StateKey, RejectsMalformedFactorLists) {
  EXPECT_THROW(StateKey(std::vector<StateKey::Factor>{}), InvalidArgument);
  EXPECT_THROW(StateKey(F{{"a", "1"}, {"a", "2"}}), InvalidArgument);
  EXPECT_THROW(StateKey("", "x"), InvalidArgument);
  EXPECT_THROW(StateKey("a", "x|y"), InvalidArgument);
  EXPECT_THROW(StateKey("a", "line\nbreak"), InvalidArgument);
}

TEST(StateKey, EqualityIsElementwise) {
  StateKey a(F{{"activity", "walk"}, {"tilt", "2"}});
  StateKey b(F{{"activity", "walk"}, {"tilt", "2"}});
  StateKey c(F{{"tilt", "2"}, {"activity", "walk"}});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(StateKey, OrdersByValuesThenNames) {
  StateKey a(F{{"x", "a"}, {"y", "z"}});
  StateKey b(F{{"x", "b"}, {"y", "a"}});
  EXPECT_LT(a, b);
  EXPECT_LT(StateKey("m", "Backward fall"), StateKey("m", "Front fall"));
  // Same values, different names: still a strict, consistent order.
  StateKey p("a", "v");
  StateKey q("b", "v");
  EXPECT_TRUE((p < q) != (q < p));
}

TEST(StateKey, ProjectKeepsRequestedOrder) {
  StateKey k(F{{"a", "1"}, {"p", "3"}, {"e", "0"}});
  const std::vector<std::string> proj = {"e", "a"};
  EXPECT_EQ(k.Project(proj), StateKey(F{{"e", "0"}, {"a", "1"}}));
  const std::vector<std::string> bad = {"u"};
  EXPECT_THROW(k.Project(bad), InvalidArgument);
}

TEST(StateKey, ToStringParseRoundTrip) {
  const std::vector<std::string> schema = {"activity", "tilt", "energy"};
  StateKey k(F{{"activity", "Stairs, up"}, {"tilt", "11"}, {"energy", "0"}});
  EXPECT_EQ(k.ToString(), "Stairs, up|11|0");
  EXPECT_EQ(StateKey::Parse(k.ToString(), schema), k);
  EXPECT_THROW(StateKey::Parse("a|b", schema), InvalidArgument);
  EXPECT_THROW(StateKey::Parse("a|b|c|d", schema), InvalidArgument);
}

TEST(StateKey, ConformsChecksNamesAndOrder) {
  StateKey k(F{{"a", "1"}, {"p", "3"}});
  const std::vector<std::string> good = {"a", "p"};
  const std::vector<std::string> swapped = {"p", "a"};
  const std::vector<std::string> short_schema = {"a"};
  EXPECT_TRUE(k.Conforms(good));
  EXPECT_FALSE(k.Conforms(swapped));
  EXPECT_FALSE(k.Conforms(short_schema));
}

TEST(ValidateSchema, RejectsEmptyAndDuplicates) {
  EXPECT_THROW(ValidateSchema(std::vector<std::string>{}), InvalidArgument);
  EXPECT_THROW(ValidateSchema(std::vector<std::string>{"a", "a"}), InvalidArgument);
  EXPECT_NO_THROW(ValidateSchema(std::vector<std::string>{"a", "b"}));
}

}  // namespace
}  // namespace blindspot
