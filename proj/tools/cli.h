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

#ifndef BLINDSPOT_TOOLS_CLI_H_
#define BLINDSPOT_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace blindspot::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kInternalError = 3,
};

// Runs the command line `args` (args[0] is the program name). Data goes to
// files named by --out/--json or to `out`; diagnostics go to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace blindspot::cli

#endif  // BLINDSPOT_TOOLS_CLI_H_
