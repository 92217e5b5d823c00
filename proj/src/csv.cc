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

#include "blindspot/csv.h"

#include "blindspot/errors.h"

namespace blindspot {

std::optional<std::vector<std::string>> CsvReader::Next() {
  if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;
  record_line_ = next_line_;
  std::vector<std::string> fields(1);
  bool quoted = false;
  char c;
  while (in_.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get(c);
          fields.back() += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++next_line_;
        fields.back() += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c == '\r' && in_.peek() == '\n') {
      // CRLF: the LF ends the record.
    } else if (c == '\n') {
      ++next_line_;
      return fields;
    } else {
      fields.back() += c;
    }
  }
  if (quoted) {
    throw DataError("unterminated quoted field starting on line " +
                    std::to_string(record_line_));
  }
  return fields;
}

std::string CsvEscape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string CsvLine(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    out += CsvEscape(fields[i]);
  }
  return out;
}

}  // namespace blindspot
