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

#include "lipnav/io.h"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace lipnav::io {
namespace {

using Json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void Fail(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

double AsNumber(const Json& j, const std::string& path) {
  if (!j.is_number()) Fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) Fail(path, "expected a finite number");
  return v;
}

int AsInt(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) Fail(path, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() ||
      v > std::numeric_limits<int>::max()) {
    Fail(path, "integer out of range");
  }
  return static_cast<int>(v);
}

std::uint64_t AsSeed(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) Fail(path, "seed must be non-negative");
  Fail(path, "expected an integer");
}

bool AsBool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) Fail(path, "expected true or false");
  return j.get<bool>();
}

std::string AsString(const Json& j, const std::string& path) {
  if (!j.is_string()) Fail(path, "expected a string");
  return j.get<std::string>();
}

Vec2 AsVec2(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) Fail(path, "expected [x, y]");
  return {AsNumber(j[0], path + "[0]"), AsNumber(j[1], path + "[1]")};
}

// Null stands for +inf.
double AsExtendedNumber(const Json& j, const std::string& path) {
  if (j.is_null()) return kInf;
  return AsNumber(j, path);
}

Json ExtendedNumber(double v) {
  if (std::isinf(v) && v > 0.0) return nullptr;
  return v;
}

// Strict view of one JSON object: every key must be consumed.
class Fields {
 public:
  Fields(const Json& j, std::string path) : json_(j), path_(std::move(path)) {
    if (!j.is_object()) {
      Fail(path_.empty() ? "<root>" : path_, "expected an object");
    }
  }

  std::string Path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const Json* Find(const std::string& key) {
    const auto it = json_.find(key);
    if (it == json_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  const Json& Require(const std::string& key) {
    const Json* j = Find(key);
    if (j == nullptr) Fail(Path(key), "missing field");
    return *j;
  }

  void Number(const std::string& key, double* out) {
    if (const Json* j = Find(key)) *out = AsNumber(*j, Path(key));
  }
  void Int(const std::string& key, int* out) {
    if (const Json* j = Find(key)) *out = AsInt(*j, Path(key));
  }
  void Bool(const std::string& key, bool* out) {
    if (const Json* j = Find(key)) *out = AsBool(*j, Path(key));
  }

  // Rejects keys that were never looked up.
  void Finish() const {
    for (auto it = json_.begin(); it != json_.end(); ++it) {
      if (!seen_.count(it.key())) Fail(Path(it.key()), "unknown field");
    }
  }

 private:
  const Json& json_;
  std::string path_;
  std::set<std::string> seen_;
};

Json ParseJson(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

// Runs a domain constructor/validator and reports its complaint at `path`.
template <typename F>
auto Checked(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    Fail(path, e.what());
  }
}

// ---------------------------------------------------------------------------
// Environment

Json ObstacleJson(const Obstacle& obs) {
  Json j;
  if (obs.is_circle()) {
    j["type"] = "circle";
    j["center"] = {obs.center().x(), obs.center().y()};
    j["radius"] = obs.circle().radius;
  } else {
    const EllipseShape& e = obs.ellipse();
    j["type"] = "ellipse";
    j["center"] = {obs.center().x(), obs.center().y()};
    j["semi_major"] = e.semi_major;
    j["semi_minor"] = e.semi_minor;
    j["rotation"] = e.rotation;
  }
  return j;
}

Obstacle ObstacleFromJson(const Json& j, const std::string& path) {
  Fields f(j, path);
  const std::string type = AsString(f.Require("type"), f.Path("type"));
  const Vec2 center = AsVec2(f.Require("center"), f.Path("center"));
  if (type == "circle") {
    const double radius = AsNumber(f.Require("radius"), f.Path("radius"));
    f.Finish();
    if (!(radius > 0.0)) Fail(f.Path("radius"), "must be positive");
    return Obstacle::Circle(center, radius);
  }
  if (type == "ellipse") {
    const double a = AsNumber(f.Require("semi_major"), f.Path("semi_major"));
    const double b = AsNumber(f.Require("semi_minor"), f.Path("semi_minor"));
    const double rot = AsNumber(f.Require("rotation"), f.Path("rotation"));
    f.Finish();
    if (!(b > 0.0)) Fail(f.Path("semi_minor"), "must be positive");
    if (b > a) Fail(f.Path("semi_minor"), "exceeds semi_major");
    return Checked(path, [&] { return Obstacle::Ellipse(center, a, b, rot); });
  }
  Fail(f.Path("type"), "expected \"circle\" or \"ellipse\"");
}

// ---------------------------------------------------------------------------
// Configuration

Json WeightsJson(const StageWeights& w) {
  return {{"position", w.position}, {"heading", w.heading}};
}

StageWeights WeightsFromJson(const Json& j, const std::string& path) {
  StageWeights w;
  Fields f(j, path);
  f.Number("position", &w.position);
  f.Number("heading", &w.heading);
  f.Finish();
  return w;
}

Json ConfigJson(const RunConfig& config) {
  const PlannerConfig& p = config.planner;
  const SimConfig& s = config.sim;
  Json stages = Json::array();
  for (const StageWeights& w : p.stage_weights) {
    stages.push_back(WeightsJson(w));
  }
  Json j;
  j["horizon"] = p.horizon;
  j["weights"] = WeightsJson(p.weights);
  j["stage_weights"] = stages;
  j["limits"] = {{"v_x_min", p.limits.v_x_min},
                 {"v_x_max", p.limits.v_x_max},
                 {"v_y_min", p.limits.v_y_min},
                 {"v_y_max", p.limits.v_y_max},
                 {"leg_reach_max", p.limits.leg_reach_max},
                 {"turn_rate_max", p.limits.turn_rate_max},
                 {"alpha", p.limits.alpha}};
  j["cbf"] = {{"gamma", p.cbf.gamma},
              {"inflation_margin", p.cbf.inflation_margin}};
  j["solver"] = {{"feasibility_tol", p.solver.feasibility_tol},
                 {"optimality_tol", p.solver.optimality_tol},
                 {"max_iterations", p.solver.max_iterations},
                 {"slack_penalty", p.solver.slack_penalty}};
  j["maneuverability"] = p.maneuverability;
  j["lip"] = {{"com_height", p.lip.com_height()},
              {"gravity", p.lip.gravity()},
              {"step_duration", p.lip.step_duration()}};
  j["sim"] = {{"max_steps", s.max_steps},
              {"replans_per_step", s.replans_per_step},
              {"arrival_radius", s.arrival_radius},
              {"lateral_offset", s.lateral_offset},
              {"initial_speed", s.initial_speed},
              {"initial_sway", s.initial_sway},
              {"disturbance",
               {{"sigma_position", s.disturbance.sigma_position},
                {"sigma_velocity", s.disturbance.sigma_velocity},
                {"seed", s.disturbance.seed}}}};
  return j;
}

RunConfig ConfigFromJson(const Json& j, const std::string& root) {
  RunConfig config;
  PlannerConfig& p = config.planner;
  SimConfig& s = config.sim;
  Fields f(j, root);
  f.Int("horizon", &p.horizon);
  if (const Json* w = f.Find("weights")) {
    p.weights = WeightsFromJson(*w, f.Path("weights"));
  }
  if (const Json* st = f.Find("stage_weights")) {
    if (!st->is_array()) Fail(f.Path("stage_weights"), "expected an array");
    for (std::size_t i = 0; i < st->size(); ++i) {
      p.stage_weights.push_back(WeightsFromJson(
          (*st)[i], f.Path("stage_weights") + "[" + std::to_string(i) + "]"));
    }
  }
  if (const Json* lj = f.Find("limits")) {
    Fields l(*lj, f.Path("limits"));
    l.Number("v_x_min", &p.limits.v_x_min);
    l.Number("v_x_max", &p.limits.v_x_max);
    l.Number("v_y_min", &p.limits.v_y_min);
    l.Number("v_y_max", &p.limits.v_y_max);
    l.Number("leg_reach_max", &p.limits.leg_reach_max);
    l.Number("turn_rate_max", &p.limits.turn_rate_max);
    l.Number("alpha", &p.limits.alpha);
    l.Finish();
  }
  if (const Json* cj = f.Find("cbf")) {
    Fields c(*cj, f.Path("cbf"));
    c.Number("gamma", &p.cbf.gamma);
    c.Number("inflation_margin", &p.cbf.inflation_margin);
    c.Finish();
  }
  if (const Json* sj = f.Find("solver")) {
    Fields c(*sj, f.Path("solver"));
    c.Number("feasibility_tol", &p.solver.feasibility_tol);
    c.Number("optimality_tol", &p.solver.optimality_tol);
    c.Int("max_iterations", &p.solver.max_iterations);
    c.Number("slack_penalty", &p.solver.slack_penalty);
    c.Finish();
  }
  f.Bool("maneuverability", &p.maneuverability);
  if (const Json* lj = f.Find("lip")) {
    Fields c(*lj, f.Path("lip"));
    double h = p.lip.com_height();
    double g = p.lip.gravity();
    double t = p.lip.step_duration();
    c.Number("com_height", &h);
    c.Number("gravity", &g);
    c.Number("step_duration", &t);
    c.Finish();
    p.lip = Checked(f.Path("lip"), [&] { return LipParams(h, g, t); });
  }
  if (const Json* sj = f.Find("sim")) {
    Fields c(*sj, f.Path("sim"));
    c.Int("max_steps", &s.max_steps);
    c.Int("replans_per_step", &s.replans_per_step);
    c.Number("arrival_radius", &s.arrival_radius);
    c.Number("lateral_offset", &s.lateral_offset);
    c.Number("initial_speed", &s.initial_speed);
    c.Number("initial_sway", &s.initial_sway);
    if (const Json* dj = c.Find("disturbance")) {
      Fields d(*dj, c.Path("disturbance"));
      d.Number("sigma_position", &s.disturbance.sigma_position);
      d.Number("sigma_velocity", &s.disturbance.sigma_velocity);
      if (const Json* seed = d.Find("seed")) {
        s.disturbance.seed = AsSeed(*seed, d.Path("seed"));
      }
      d.Finish();
    }
    c.Finish();
  }
  f.Finish();
  const std::string where = root.empty() ? "<config>" : root;
  Checked(where, [&] {
    p.Validate();
    s.Validate();
    return 0;
  });
  return config;
}

// ---------------------------------------------------------------------------
// Report

Json EpisodeJson(const EpisodeRecord& e) {
  Json j;
  j["seed"] = e.seed;
  j["finish"] = e.outcome.finish;
  j["violate"] = e.outcome.violate;
  j["enter"] = e.outcome.enter;
  j["collide"] = e.outcome.collide;
  j["steps"] = e.steps;
  j["replans"] = e.replans;
  j["failed_replans"] = e.failed_replans;
  j["relaxed_replans"] = e.relaxed_replans;
  j["min_h_true"] = ExtendedNumber(e.min_h_true);
  j["min_h_inflated"] = ExtendedNumber(e.min_h_inflated);
  j["min_h_inflated_optimal"] = ExtendedNumber(e.min_h_inflated_optimal);
  j["max_step_deviation"] = e.max_step_deviation;
  j["error"] = e.error;
  return j;
}

EpisodeRecord EpisodeFromJson(const Json& j, const std::string& path) {
  EpisodeRecord e;
  Fields f(j, path);
  e.seed = AsSeed(f.Require("seed"), f.Path("seed"));
  e.outcome.finish = AsBool(f.Require("finish"), f.Path("finish"));
  e.outcome.violate = AsBool(f.Require("violate"), f.Path("violate"));
  e.outcome.enter = AsBool(f.Require("enter"), f.Path("enter"));
  e.outcome.collide = AsBool(f.Require("collide"), f.Path("collide"));
  e.steps = AsInt(f.Require("steps"), f.Path("steps"));
  e.replans = AsInt(f.Require("replans"), f.Path("replans"));
  e.failed_replans =
      AsInt(f.Require("failed_replans"), f.Path("failed_replans"));
  e.relaxed_replans =
      AsInt(f.Require("relaxed_replans"), f.Path("relaxed_replans"));
  e.min_h_true =
      AsExtendedNumber(f.Require("min_h_true"), f.Path("min_h_true"));
  e.min_h_inflated =
      AsExtendedNumber(f.Require("min_h_inflated"), f.Path("min_h_inflated"));
  e.min_h_inflated_optimal = AsExtendedNumber(
      f.Require("min_h_inflated_optimal"), f.Path("min_h_inflated_optimal"));
  e.max_step_deviation =
      AsNumber(f.Require("max_step_deviation"), f.Path("max_step_deviation"));
  e.error = AsString(f.Require("error"), f.Path("error"));
  f.Finish();
  return e;
}

// ---------------------------------------------------------------------------
// CSV

std::string FormatNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string CsvWhere(int line, int column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

double CsvNumber(const std::string& cell, int line, int column) {
  if (cell.empty()) Fail(CsvWhere(line, column), "empty field");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || errno == ERANGE || std::isnan(v)) {
    Fail(CsvWhere(line, column), "not a number: '" + cell + "'");
  }
  return v;
}

double CsvFinite(const std::string& cell, int line, int column) {
  const double v = CsvNumber(cell, line, column);
  if (!std::isfinite(v)) {
    Fail(CsvWhere(line, column), "expected a finite number");
  }
  return v;
}

int CsvInt(const std::string& cell, int line, int column) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(cell.c_str(), &end, 10);
  if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE ||
      v < 0 || v > std::numeric_limits<int>::max()) {
    Fail(CsvWhere(line, column), "not a step index: '" + cell + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return ss.str();
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

std::string SerializeEnvironment(const Environment& env) {
  Json j;
  j["seed"] = env.seed;
  j["start"] = {env.start.x(), env.start.y()};
  j["goal"] = {env.goal.x(), env.goal.y()};
  j["bounds"] = {env.bounds.x_min, env.bounds.y_min, env.bounds.x_max,
                 env.bounds.y_max};
  Json obstacles = Json::array();
  for (const Obstacle& obs : env.obstacles) {
    obstacles.push_back(ObstacleJson(obs));
  }
  j["obstacles"] = obstacles;
  return j.dump(2) + "\n";
}

Environment ParseEnvironment(const std::string& text) {
  const Json j = ParseJson(text);
  Environment env;
  Fields f(j, "");
  env.seed = AsSeed(f.Require("seed"), "seed");
  env.start = AsVec2(f.Require("start"), "start");
  env.goal = AsVec2(f.Require("goal"), "goal");
  const Json& b = f.Require("bounds");
  if (!b.is_array() || b.size() != 4) {
    Fail("bounds", "expected [x_min, y_min, x_max, y_max]");
  }
  env.bounds = {AsNumber(b[0], "bounds[0]"), AsNumber(b[1], "bounds[1]"),
                AsNumber(b[2], "bounds[2]"), AsNumber(b[3], "bounds[3]")};
  if (!env.bounds.IsValid()) Fail("bounds", "empty region");
  const Json& obs = f.Require("obstacles");
  if (!obs.is_array()) Fail("obstacles", "expected an array");
  for (std::size_t i = 0; i < obs.size(); ++i) {
    env.obstacles.push_back(
        ObstacleFromJson(obs[i], "obstacles[" + std::to_string(i) + "]"));
  }
  f.Finish();
  return env;
}

void SaveEnvironment(const std::filesystem::path& path,
                     const Environment& env) {
  WriteFile(path, SerializeEnvironment(env));
}

Environment LoadEnvironment(const std::filesystem::path& path) {
  try {
    return ParseEnvironment(ReadFile(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string SerializeConfig(const RunConfig& config) {
  return ConfigJson(config).dump(2) + "\n";
}

RunConfig ParseConfig(const std::string& text) {
  return ConfigFromJson(ParseJson(text), "");
}

void SaveConfig(const std::filesystem::path& path, const RunConfig& config) {
  WriteFile(path, SerializeConfig(config));
}

RunConfig LoadConfig(const std::filesystem::path& path) {
  try {
    return ParseConfig(ReadFile(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void WriteTrajectory(std::ostream& out,
                     std::span<const EpisodeSample> samples) {
  out << kTrajectoryHeader << '\n';
  for (const EpisodeSample& s : samples) {
    out << FormatNumber(s.time) << ',' << s.step << ','
        << FormatNumber(s.state.p_x) << ',' << FormatNumber(s.state.v_x) << ','
        << FormatNumber(s.state.p_y) << ',' << FormatNumber(s.state.v_y) << ','
        << FormatNumber(s.state.theta) << ',' << FormatNumber(s.control.f_x)
        << ',' << FormatNumber(s.control.f_y) << ','
        << FormatNumber(s.control.omega) << ',' << StanceName(s.stance) << ','
        << SolverStatusName(s.status) << ',' << FormatNumber(s.max_slack) << ','
        << FormatNumber(s.min_h_true) << ',' << FormatNumber(s.min_h_inflated)
        << '\n';
  }
}

std::vector<EpisodeSample> ReadTrajectory(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) Fail("line 1", "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrajectoryHeader) {
    const std::vector<std::string> want = SplitCsv(kTrajectoryHeader);
    const std::vector<std::string> got = SplitCsv(line);
    for (std::size_t i = 0; i < want.size(); ++i) {
      if (i >= got.size() || got[i] != want[i]) {
        Fail(CsvWhere(1, static_cast<int>(i) + 1),
             "expected column '" + want[i] + "'");
      }
    }
    Fail(CsvWhere(1, static_cast<int>(want.size()) + 1), "unexpected column");
  }
  constexpr int kColumns = 15;
  std::vector<EpisodeSample> samples;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> c = SplitCsv(line);
    if (static_cast<int>(c.size()) != kColumns) {
      Fail("line " + std::to_string(line_no),
           "expected " + std::to_string(kColumns) + " fields, got " +
               std::to_string(c.size()));
    }
    EpisodeSample s;
    s.time = CsvFinite(c[0], line_no, 1);
    s.step = CsvInt(c[1], line_no, 2);
    s.state.p_x = CsvFinite(c[2], line_no, 3);
    s.state.v_x = CsvFinite(c[3], line_no, 4);
    s.state.p_y = CsvFinite(c[4], line_no, 5);
    s.state.v_y = CsvFinite(c[5], line_no, 6);
    s.state.theta = CsvFinite(c[6], line_no, 7);
    s.control.f_x = CsvFinite(c[7], line_no, 8);
    s.control.f_y = CsvFinite(c[8], line_no, 9);
    s.control.omega = CsvFinite(c[9], line_no, 10);
    if (c[10] == "Left") {
      s.stance = StanceFoot::kLeft;
    } else if (c[10] == "Right") {
      s.stance = StanceFoot::kRight;
    } else {
      Fail(CsvWhere(line_no, 11), "expected Left or Right");
    }
    try {
      s.status = ParseSolverStatus(c[11]);
    } catch (const std::invalid_argument&) {
      Fail(CsvWhere(line_no, 12), "unknown solver status '" + c[11] + "'");
    }
    s.max_slack = CsvFinite(c[12], line_no, 13);
    s.min_h_true = CsvNumber(c[13], line_no, 14);
    s.min_h_inflated = CsvNumber(c[14], line_no, 15);
    if (!samples.empty() && !(s.time > samples.back().time)) {
      Fail(CsvWhere(line_no, 1), "time is not increasing");
    }
    samples.push_back(s);
  }
  return samples;
}

void SaveTrajectory(const std::filesystem::path& path,
                    std::span<const EpisodeSample> samples) {
  std::ostringstream out;
  WriteTrajectory(out, samples);
  WriteFile(path, out.str());
}

std::vector<EpisodeSample> LoadTrajectory(const std::filesystem::path& path) {
  std::istringstream in(ReadFile(path));
  try {
    return ReadTrajectory(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string SerializeReport(const Report& report) {
  Json planners = Json::array();
  for (const PlannerBlock& block : report.table.planners) {
    Json episodes = Json::array();
    for (const EpisodeRecord& e : block.episodes) {
      episodes.push_back(EpisodeJson(e));
    }
    Json b;
    b["planner"] = PlannerKindName(block.planner);
    b["finish"] = block.finish;
    b["violate"] = block.violate;
    b["enter"] = block.enter;
    b["collide"] = block.collide;
    b["episodes"] = episodes;
    planners.push_back(b);
  }
  Json j;
  j["planners"] = planners;
  j["config"] = ConfigJson(report.config);
  return j.dump(2) + "\n";
}

Report ParseReport(const std::string& text) {
  const Json j = ParseJson(text);
  Report report;
  Fields f(j, "");
  const Json& planners = f.Require("planners");
  if (!planners.is_array()) Fail("planners", "expected an array");
  for (std::size_t i = 0; i < planners.size(); ++i) {
    const std::string path = "planners[" + std::to_string(i) + "]";
    Fields b(planners[i], path);
    PlannerBlock block;
    const std::string name = AsString(b.Require("planner"), b.Path("planner"));
    block.planner =
        Checked(b.Path("planner"), [&] { return ParsePlannerKind(name); });
    block.finish = AsInt(b.Require("finish"), b.Path("finish"));
    block.violate = AsInt(b.Require("violate"), b.Path("violate"));
    block.enter = AsInt(b.Require("enter"), b.Path("enter"));
    block.collide = AsInt(b.Require("collide"), b.Path("collide"));
    const Json& episodes = b.Require("episodes");
    if (!episodes.is_array()) Fail(b.Path("episodes"), "expected an array");
    int finish = 0, violate = 0, enter = 0, collide = 0;
    for (std::size_t k = 0; k < episodes.size(); ++k) {
      EpisodeRecord e = EpisodeFromJson(
          episodes[k], b.Path("episodes") + "[" + std::to_string(k) + "]");
      finish += e.outcome.finish;
      violate += e.outcome.violate;
      enter += e.outcome.enter;
      collide += e.outcome.collide;
      block.episodes.push_back(std::move(e));
    }
    b.Finish();
    if (finish != block.finish || violate != block.violate ||
        enter != block.enter || collide != block.collide) {
      Fail(path, "counts disagree with the per-seed flags");
    }
    report.table.planners.push_back(std::move(block));
  }
  report.config = ConfigFromJson(f.Require("config"), "config");
  f.Finish();
  return report;
}

void SaveReport(const std::filesystem::path& path, const Report& report) {
  WriteFile(path, SerializeReport(report));
}

Report LoadReport(const std::filesystem::path& path) {
  try {
    return ParseReport(ReadFile(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace lipnav::io
