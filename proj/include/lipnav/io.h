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

// File formats: environment and configuration JSON, trajectory CSV and the
// benchmark report. Loaders are strict: unknown fields, missing required
// fields and out-of-range values raise ParseError naming the field (JSON) or
// line and column (CSV).

#ifndef LIPNAV_IO_H_
#define LIPNAV_IO_H_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lipnav/environment.h"
#include "lipnav/lip_mpc_planner.h"
#include "lipnav/nav_sim.h"

namespace lipnav::io {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Read/write failures on the file system.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Environment

std::string SerializeEnvironment(const Environment& env);
Environment ParseEnvironment(const std::string& text);
void SaveEnvironment(const std::filesystem::path& path, const Environment& env);
Environment LoadEnvironment(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Run configuration: planner settings plus simulator settings. Every field
// is optional and defaults to the values in PlannerConfig and SimConfig. The
// planner goal is not part of it; it comes from the environment.

struct RunConfig {
  PlannerConfig planner;
  SimConfig sim;
};

std::string SerializeConfig(const RunConfig& config);
RunConfig ParseConfig(const std::string& text);
void SaveConfig(const std::filesystem::path& path, const RunConfig& config);
RunConfig LoadConfig(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Trajectory CSV, one row per sample.

inline constexpr const char* kTrajectoryHeader =
    "time_s,step,p_x,v_x,p_y,v_y,theta,f_x,f_y,omega,stance,solver_status,"
    "max_slack,min_h_true,min_h_inflated";

void WriteTrajectory(std::ostream& out, std::span<const EpisodeSample> samples);
std::vector<EpisodeSample> ReadTrajectory(std::istream& in);
void SaveTrajectory(const std::filesystem::path& path,
                    std::span<const EpisodeSample> samples);
std::vector<EpisodeSample> LoadTrajectory(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Benchmark report. Infinite barrier values (no obstacles) are written as
// null.

struct Report {
  RunConfig config;
  BenchmarkTable table;
};

std::string SerializeReport(const Report& report);
// Also checks that every count equals the sum of its per-seed flags.
Report ParseReport(const std::string& text);
void SaveReport(const std::filesystem::path& path, const Report& report);
Report LoadReport(const std::filesystem::path& path);

// Whole-file helpers; throw IoError.
std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, const std::string& text);

}  // namespace lipnav::io

#endif  // LIPNAV_IO_H_
