// Copyright 2026 The occgrid Authors
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


#ifndef OCCGRID__TOOLS__CLI_HPP_
#define OCCGRID__TOOLS__CLI_HPP_

#include "occgrid/common.hpp"

namespace occgrid
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

/// Exit status for a library error: 10 + the category value.
int exit_code_for(ErrorCategory c);

/// Entry point of the `occgrid` command line tool.
int cli_main(int argc, char ** argv);

}  // namespace occgrid

#endif  // OCCGRID__TOOLS__CLI_HPP_
