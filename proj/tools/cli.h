// Copyright 2026 The crowdmech Authors.
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

#ifndef CROWDMECH_TOOLS_CLI_H_
#define CROWDMECH_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace crowdmech {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 1,
  kExitInvariantViolation = 2,
};

// Entry point of the crowdmech tool. Reports go to --out or `out`;
// diagnostics and usage go to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace crowdmech

#endif  // CROWDMECH_TOOLS_CLI_H_
