// Copyright 2026 The lipnav Authors
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

// Command-line front end: gen-env, simulate and bench.

#ifndef LIPNAV_CLI_H_
#define LIPNAV_CLI_H_

#include <iosfwd>
#include <span>

#include "lipnav/nav_sim.h"

namespace lipnav::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // validation, parse or I/O error
inline constexpr int kUsage = 2;    // bad command line

// Mean |omega| over the steps of an episode, one value per step.
double MeanAbsTurnRate(std::span<const EpisodeSample> samples);

// Runs one command. Never throws; every error becomes a message on `err`
// and a nonzero return value.
int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace lipnav::cli

#endif  // LIPNAV_CLI_H_
