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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>

#include "lipnav/angles.h"
#include "lipnav/cli.h"
#include "lipnav/dd_baseline.h"
#include "lipnav/environment.h"
#include "lipnav/lip_model.h"
#include "lipnav/lip_mpc_planner.h"
#include "lipnav/nav_sim.h"
#include "lipnav/obstacle.h"
#include "lipnav/safety_constraints.h"
#include "test_support.h"

namespace lipnav {
namespace {

using testing::MaxRelErr;
using testing::NumericJacobian;
using testing::RelErr;
using testing::Uniform;

constexpr int kBenchmarkEnvironments = 20;
constexpr int kObstacles = 8;
constexpr std::uint64_t kAblationSeed = 2;
constexpr std::uint64_t kLatencySeed = 0;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, double a, double b = 0.0, double c = 0.0,
                   double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  return buf;
}

Environment BenchmarkEnvironment(std::uint64_t seed) {
  return GenerateEnvironment(seed, kObstacles, Bounds{}, {0.0, 0.0},
                             {10.0, 10.0});
}

Verdict DynamicsOracle() {
  std::mt19937_64 rng(101);
  const LipParams params;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const LipState x = testing::RandomState(rng);
    const StepControl u = testing::RandomControl(rng, x);
    const Vec5 exact = StepDynamics(x, u, params).ToVector();
    const Vec5 rk4 = testing::Rk4Step(x, u, params).ToVector();
    for (int j = 0; j < 5; ++j)
      worst = std::max(worst, RelErr(exact(j), rk4(j)));
  }
  return {worst <= 1e-6,
          Format("max relative error %.3g over 100 pairs", worst)};
}

// Walks a point toward each obstacle so that the barrier decays by exactly
// (1 - gamma) per step, then measures the barrier the library reports.
Verdict DcbfDecay() {
  constexpr double kGamma = 0.3;
  const std::vector<Obstacle> shapes = {
      Obstacle::Circle({1.0, -2.0}, 0.7),
      Obstacle::Ellipse({-0.5, 0.4}, 1.1, 0.45, 0.6)};
  double worst_decay = 0.0;
  double worst_residual = 0.0;
  for (const Obstacle& obs : shapes) {
    for (double h0 : {0.05, 1.0, 6.0}) {
      const Vec2 dir = Vec2(0.6, 0.8).normalized();
      // Barrier along the ray c + t dir is t^2 q - rho.
      const double rho = BarrierValue(obs, obs.center()) * -1.0;
      const double q = BarrierValue(obs, obs.center() + dir) + rho;
      double h_prev = 0.0;
      for (int k = 0; k <= 50; ++k) {
        const double target = std::pow(1.0 - kGamma, k) * h0;
        const Vec2 p = obs.center() + std::sqrt((target + rho) / q) * dir;
        const double h = BarrierValue(obs, p);
        worst_decay = std::max(worst_decay, std::abs(h - target));
        if (k > 0) {
          worst_residual = std::max(worst_residual,
                                    std::abs(DcbfResidual(h, h_prev, kGamma)));
        }
        h_prev = h;
      }
    }
  }
  return {worst_decay <= 1e-12 && worst_residual <= 1e-12,
          Format("max |h_k - 0.7^k h_0| %.3g, max |residual| %.3g over k <= 50",
                 worst_decay, worst_residual)};
}

Verdict GradientSuite() {
  std::mt19937_64 rng(103);
  double cost_err = 0.0;
  double bundle_err = 0.0;
  double nlp_err = 0.0;
  const StageWeights weights{1.0, 50.0};
  const KinematicLimits limits;
  for (int i = 0; i < 100; ++i) {
    const LipState x = testing::RandomState(rng);
    const Vec2 goal = testing::RandomGoal(rng, x);
    auto cost = [&](const Eigen::VectorXd& q) {
      return Eigen::VectorXd::Constant(
          1, StageCost(LipState::FromVector(q), goal, weights));
    };
    cost_err = std::max(
        cost_err, MaxRelErr(StageCostGradient(x, goal, weights).transpose(),
                            NumericJacobian(cost, x.ToVector())));
  }
  for (int i = 0; i < 100; ++i) {
    const int n = 1 + i % 3;
    const LipState x0 = testing::RandomState(rng);
    std::vector<LipState> xs(n);
    std::vector<StepControl> us(n);
    Eigen::VectorXd z(8 * n);
    for (int k = 0; k < n; ++k) {
      xs[k] = testing::RandomState(rng);
      us[k] = testing::RandomControl(rng, xs[k]);
      z.segment<5>(5 * k) = xs[k].ToVector();
      z.segment<3>(5 * n + 3 * k) = us[k].ToVector();
    }
    std::vector<Obstacle> obs;
    for (int j = 0; j < 1 + i % 4; ++j) {
      obs.push_back(testing::RandomObstacle(rng));
    }
    const StanceFoot s0 = i % 2 ? StanceFoot::kLeft : StanceFoot::kRight;
    auto eval = [&](const Eigen::VectorXd& q) -> Eigen::VectorXd {
      std::vector<LipState> qx(n);
      std::vector<StepControl> qu(n);
      for (int k = 0; k < n; ++k) {
        qx[k] = LipState::FromVector(q.segment<5>(5 * k));
        qu[k] = StepControl::FromVector(q.segment<3>(5 * n + 3 * k));
      }
      return EvaluateConstraintBundle(x0, qx, qu, s0, obs, limits, {}).values;
    };
    const ConstraintBundle b =
        EvaluateConstraintBundle(x0, xs, us, s0, obs, limits, {});
    bundle_err =
        std::max(bundle_err, MaxRelErr(b.jacobian, NumericJacobian(eval, z)));
  }
  for (int i = 0; i < 100; ++i) {
    PlannerConfig config;
    config.maneuverability = i % 2 == 0;
    std::vector<Obstacle> obs;
    for (int j = 0; j < i % 4; ++j) obs.push_back(testing::RandomObstacle(rng));
    const LipState x0 = testing::RandomCruise(rng);
    config.goal = testing::RandomGoal(rng, x0);
    const NlpProblem prob = Assemble(x0, StanceFoot::kRight, obs, config);
    Eigen::VectorXd z = prob.initial_guess();
    for (int j = 0; j < z.size(); ++j) z(j) += Uniform(rng, -0.1, 0.1);
    for (int j = 3 * config.horizon; j < z.size(); ++j) z(j) = std::abs(z(j));
    nlp::Evaluation ev;
    prob.Evaluate(z, &ev);
    auto f = [&](const Eigen::VectorXd& q) {
      nlp::Evaluation e;
      prob.Evaluate(q, &e);
      return Eigen::VectorXd::Constant(1, e.objective);
    };
    auto c = [&](const Eigen::VectorXd& q) {
      nlp::Evaluation e;
      prob.Evaluate(q, &e);
      return Eigen::VectorXd(e.constraints);
    };
    nlp_err = std::max(
        {nlp_err, MaxRelErr(ev.gradient.transpose(), NumericJacobian(f, z)),
         MaxRelErr(ev.jacobian, NumericJacobian(c, z))});
  }
  const double worst = std::max({cost_err, bundle_err, nlp_err});
  return {worst <= 1e-5,
          Format("max relative error: stage cost %.3g, constraint rows %.3g, "
                 "full problem %.3g",
                 cost_err, bundle_err, nlp_err)};
}

Verdict BruteForceOptimality() {
  std::mt19937_64 rng(104);
  int checked = 0;
  double worst_gap = -std::numeric_limits<double>::infinity();
  int non_optimal = 0;
  for (int i = 0; checked < 10 && i < 100; ++i) {
    PlannerConfig config;
    config.horizon = 1;
    const LipState x0 = testing::RandomCruise(rng);
    config.goal = testing::RandomGoal(rng, x0);
    const NlpProblem prob = Assemble(x0, StanceFoot::kRight, {}, config);
    const double best = testing::GridBest(prob, config);
    if (!std::isfinite(best)) continue;
    const NlpSolution sol = Solve(prob, config);
    if (sol.status != SolverStatus::kOptimal) ++non_optimal;
    worst_gap = std::max(worst_gap, sol.objective - best);
    ++checked;
  }
  return {checked == 10 && non_optimal == 0 && worst_gap <= 1e-3,
          Format("%g instances, %g not optimal, max (solver - grid) %.3g",
                 checked, non_optimal, worst_gap)};
}

Verdict Benchmark(const BenchmarkTable& table) {
  const PlannerBlock& lip = table.planners[0];
  const PlannerBlock& dd = table.planners[1];
  const bool pass = lip.collide == 0 && lip.finish >= 18 &&
                    dd.collide > lip.collide && dd.finish < lip.finish;
  std::string detail =
      "lip finish/violate/enter/collide " + std::to_string(lip.finish) + "/" +
      std::to_string(lip.violate) + "/" + std::to_string(lip.enter) + "/" +
      std::to_string(lip.collide) + ", dd " + std::to_string(dd.finish) + "/" +
      std::to_string(dd.violate) + "/" + std::to_string(dd.enter) + "/" +
      std::to_string(dd.collide);
  std::string collided;
  for (const PlannerBlock* block : {&lip, &dd}) {
    for (const EpisodeRecord& e : block->episodes) {
      if (!e.outcome.collide) continue;
      collided += std::string(collided.empty() ? "" : ", ") +
                  PlannerKindName(block->planner) + " seed " +
                  std::to_string(e.seed);
    }
  }
  if (!collided.empty()) detail += " (collisions: " + collided + ")";
  return {pass, detail};
}

double HeadingVariation(const EpisodeLog& log) {
  double tv = 0.0;
  for (std::size_t i = 1; i < log.samples.size(); ++i) {
    tv += std::abs(
        WrapAngle(log.samples[i].state.theta - log.samples[i - 1].state.theta));
  }
  return tv;
}

double LongitudinalSpeed(const LipState& x) {
  return x.v_x * std::cos(x.theta) + x.v_y * std::sin(x.theta);
}

Verdict Ablation() {
  const Environment env = BenchmarkEnvironment(kAblationSeed);
  const PlannerConfig full;
  PlannerConfig ablated;
  ablated.weights.heading = 0.0;
  ablated.maneuverability = false;
  const SimConfig sim;
  const EpisodeLog full_log = RunEpisode(env, PlannerKind::kLip, full, sim);
  const EpisodeLog ablated_log =
      RunEpisode(env, PlannerKind::kLip, ablated, sim);
  const double omega_full = cli::MeanAbsTurnRate(full_log.samples);
  const double omega_ablated = cli::MeanAbsTurnRate(ablated_log.samples);
  const double tv_full = HeadingVariation(full_log);
  const double tv_ablated = HeadingVariation(ablated_log);

  // Straight-line cruise of the full planner on an open field, away from
  // the start transient and the goal.
  Environment open;
  open.goal = {20.0, 0.0};
  const EpisodeLog straight = RunEpisode(open, PlannerKind::kLip, full, sim);
  double straight_sum = 0.0;
  int straight_n = 0;
  const int r = sim.replans_per_step;
  for (std::size_t i = 0; i < straight.samples.size(); i += r) {
    const EpisodeSample& s = straight.samples[i];
    if (s.step < 3 || (s.state.position() - open.goal).norm() < 2.0) continue;
    straight_sum += LongitudinalSpeed(s.state);
    ++straight_n;
  }
  // Speed at the start of each step whose turn exceeds half the rate limit.
  const double threshold = 0.5 * full.limits.turn_rate_max;
  double turn_sum = 0.0;
  int turn_n = 0;
  for (std::size_t i = 0; i < full_log.samples.size(); i += r) {
    const EpisodeSample& s = full_log.samples[i];
    if (std::abs(s.control.omega) <= threshold) continue;
    turn_sum += LongitudinalSpeed(s.state);
    ++turn_n;
  }
  const double straight_speed =
      straight_n > 0 ? straight_sum / straight_n : std::nan("");
  const double turn_speed = turn_n > 0 ? turn_sum / turn_n : std::nan("");
  const bool pass = omega_ablated > omega_full && tv_ablated > tv_full &&
                    turn_n > 0 && straight_n > 0 &&
                    straight_speed - turn_speed >= 0.05;
  return {pass,
          Format("mean |omega| %.4f vs %.4f, heading variation %.3f vs %.3f "
                 "(ablated vs full); ",
                 omega_ablated, omega_full, tv_ablated, tv_full) +
              Format("speed turning %.3f over %g steps, straight %.3f",
                     turn_speed, turn_n, straight_speed)};
}

Verdict Latency() {
  const EpisodeLog log =
      RunEpisode(BenchmarkEnvironment(kLatencySeed), PlannerKind::kLip,
                 PlannerConfig{}, SimConfig{});
  std::vector<double> times = log.plan_times;
  if (times.empty()) return {false, "no replans"};
  std::sort(times.begin(), times.end());
  const std::size_t n = times.size();
  const double median =
      n % 2 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
  return {median <= 0.050, Format("median %.2f ms, max %.2f ms over %g replans",
                                  1e3 * median, 1e3 * times.back(), n)};
}

Verdict Deadbeat() {
  std::mt19937_64 rng(108);
  const LipParams params;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const LipState x = testing::RandomState(rng);
    const StanceFoot stance = i % 2 ? StanceFoot::kLeft : StanceFoot::kRight;
    const Vec2 target(Uniform(rng, -1.0, 1.0), Uniform(rng, -1.0, 1.0));
    const Vec2 foot = DeadbeatFootPlacement(x, stance, target, params, 0.0);
    const LipState end = StepDynamics(x, {foot.x(), foot.y(), 0.0}, params);
    worst = std::max({worst, std::abs(end.v_x - target.x()),
                      std::abs(end.v_y - target.y())});
  }
  return {
      worst <= 1e-9,
      Format("max per-axis velocity error %.3g m/s over 100 targets", worst)};
}

Verdict OptimalSamplesStayOutside(const BenchmarkTable& table) {
  const PlannerBlock& lip = table.planners[0];
  double worst = std::numeric_limits<double>::infinity();
  std::uint64_t worst_seed = 0;
  int failing = 0;
  for (const EpisodeRecord& e : lip.episodes) {
    if (e.min_h_inflated_optimal < -1e-6) ++failing;
    if (e.min_h_inflated_optimal < worst) {
      worst = e.min_h_inflated_optimal;
      worst_seed = e.seed;
    }
  }
  return {failing == 0 && lip.episodes.size() == kBenchmarkEnvironments,
          Format("min inflated barrier over Optimal samples %.4g (seed %g), "
                 "%g of %g episodes below -1e-6",
                 worst, static_cast<double>(worst_seed), failing,
                 static_cast<double>(lip.episodes.size()))};
}

bool Report(int id, const char* name, const Verdict& v) {
  std::printf("%s criterion %d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name,
              v.detail.c_str());
  std::fflush(stdout);
  return v.pass;
}

int Main() {
  bool ok = true;
  ok &= Report(1, "dynamics oracle", DynamicsOracle());
  ok &= Report(2, "barrier decay law", DcbfDecay());
  ok &= Report(3, "gradient suite", GradientSuite());
  ok &= Report(4, "horizon-one optimality", BruteForceOptimality());

  std::vector<Environment> envs;
  for (int seed = 0; seed < kBenchmarkEnvironments; ++seed) {
    envs.push_back(BenchmarkEnvironment(seed));
  }
  const std::vector<PlannerKind> planners{PlannerKind::kLip, PlannerKind::kDd};
  const int jobs =
      std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  const BenchmarkTable table =
      RunBenchmark(envs, planners, PlannerConfig{}, SimConfig{}, jobs);

  ok &= Report(5, "benchmark outcomes", Benchmark(table));
  ok &= Report(6, "ablation", Ablation());
  ok &= Report(7, "replan latency", Latency());
  ok &= Report(8, "deadbeat tracker", Deadbeat());
  ok &= Report(9, "closed-loop safety", OptimalSamplesStayOutside(table));
  return ok ? 0 : 1;
}

}  // namespace
}  // namespace lipnav

int main() { return lipnav::Main(); }
