/* Copyright 2026 The critnav Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef CRITNAV_TOOLS_COMMANDS_H_
#define CRITNAV_TOOLS_COMMANDS_H_

#include <ostream>

namespace critnav::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitHazard = 1;  // only with --fail-on-hazard
inline constexpr int kExitUsage = 2;

// Entry point of the `critnav` binary; returns the process exit code.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace critnav::cli

#endif  // CRITNAV_TOOLS_COMMANDS_H_
