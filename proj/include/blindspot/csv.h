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

#ifndef BLINDSPOT_CSV_H_
#define BLINDSPOT_CSV_H_

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace blindspot {

// Minimal RFC 4180 reader: comma separated, double-quoted fields with ""
// escapes, LF or CRLF line endings.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Next record, or nullopt at end of input. Throws DataError on an
  // unterminated quoted field.
  std::optional<std::vector<std::string>> Next();

  // Physical line on which the most recently returned record started.
  size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  size_t next_line_ = 1;
  size_t record_line_ = 0;
};

// Quotes a field when it contains a comma, quote, or line break.
std::string CsvEscape(std::string_view field);

// Joins escaped fields with commas.
std::string CsvLine(const std::vector<std::string>& fields);

}  // namespace blindspot

#endif  // BLINDSPOT_CSV_H_
