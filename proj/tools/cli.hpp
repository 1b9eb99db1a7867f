// Copyright 2026 The concate Authors
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

#ifndef CONCATE_TOOLS_CLI_HPP_
#define CONCATE_TOOLS_CLI_HPP_

#include <iosfwd>

namespace concate::cli {

// Entry point shared by the executable and the tests. Returns the process
// exit code: 0 success, 2 invalid arguments, 3 unreadable or inconsistent
// data, 4 degenerate statistics (empty arm, empty scan).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace concate::cli

#endif  // CONCATE_TOOLS_CLI_HPP_
