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

#include "lipnav/sqp_solver.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace lipnav::nlp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd PinnedTailProblem::Embed(const VectorXd& z) const {
  VectorXd full = VectorXd::Zero(base_.num_variables());
  full.head(n_) = z;
  return full;
}

void PinnedTailProblem::Evaluate(const VectorXd& z, Evaluation* out) const {
  base_.Evaluate(Embed(z), out);
  out->gradient.conservativeResize(n_);
  out->jacobian.conservativeResize(Eigen::NoChange, n_);
}

const char* SqpStatusName(SqpStatus status) {
  switch (status) {
    case SqpStatus::kConverged:
      return "converged";
    case SqpStatus::kInfeasible:
      return "infeasible";
    case SqpStatus::kMaxIterations:
      return "max_iterations";
    case SqpStatus::kLineSearchFailure:
      return "line_search_failure";
    case SqpStatus::kNumericalError:
      return "numerical_error";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Interior-point QP.

namespace {

struct QpIterate {
  VectorXd d, s, lambda, t, nu;
};

struct QpDirection {
  VectorXd d, s, lambda, t, nu;
};

// Largest alpha in (0, 1] keeping v + alpha * dv >= 0.
double MaxStep(const VectorXd& v, const VectorXd& dv, double alpha) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
  }
  return alpha;
}

}  // namespace

QpResult SolveQp(const QpProblem& qp, const QpOptions& options) {
  const int n = static_cast<int>(qp.gradient.size());
  const int m = static_cast<int>(qp.b.size());
  const double rho = qp.penalty;

  VectorXd is_elastic(m);
  int num_elastic = 0;
  for (int i = 0; i < m; ++i) {
    is_elastic(i) = qp.elastic[i] ? 1.0 : 0.0;
    num_elastic += qp.elastic[i] ? 1 : 0;
  }

  QpIterate it;
  it.d = VectorXd::Zero(n);
  it.s.resize(m);
  it.lambda.resize(m);
  it.t = VectorXd::Zero(m);
  it.nu = VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    if (qp.elastic[i]) {
      it.s(i) = std::max(qp.b(i), 0.0) + 1.0;
      it.t(i) = std::max(-qp.b(i), 0.0) + 1.0;
      it.lambda(i) = std::min(1.0, 0.5 * rho);
      it.nu(i) = rho - it.lambda(i);
    } else {
      it.s(i) = std::max(qp.b(i), 1.0);
      it.lambda(i) = 1.0;
    }
  }

  const double g_scale = 1.0 + qp.gradient.lpNorm<Eigen::Infinity>();
  const double b_scale = 1.0 + (m > 0 ? qp.b.lpNorm<Eigen::Infinity>() : 0.0);
  const double n_pairs = std::max(1, m + num_elastic);

  QpResult result;
  VectorXd r_d(n), r_p(m), r_t(m), w_inv(m);
  Eigen::LLT<MatrixXd> llt;

  auto solve_direction = [&](const VectorXd& r_sl, const VectorXd& r_tn) {
    // Eliminates s, t and nu row by row; leaves a reduced system in d.
    VectorXd e = -r_sl.cwiseQuotient(it.lambda);
    for (int i = 0; i < m; ++i) {
      if (qp.elastic[i]) e(i) += (r_tn(i) - it.t(i) * r_t(i)) / it.nu(i);
    }
    const VectorXd rhs_rows = w_inv.cwiseProduct(-r_p - e);
    QpDirection dir;
    dir.d = llt.solve(-r_d + qp.a.transpose() * rhs_rows);
    dir.lambda = rhs_rows - w_inv.cwiseProduct(qp.a * dir.d);
    dir.s = (r_sl - it.s.cwiseProduct(dir.lambda)).cwiseQuotient(it.lambda);
    dir.nu = VectorXd::Zero(m);
    dir.t = VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) {
      if (!qp.elastic[i]) continue;
      dir.nu(i) = r_t(i) - dir.lambda(i);
      dir.t(i) = (r_tn(i) - it.t(i) * dir.nu(i)) / it.nu(i);
    }
    return dir;
  };

  auto max_step = [&](const QpDirection& dir) {
    double alpha = MaxStep(it.s, dir.s, 1.0);
    alpha = MaxStep(it.lambda, dir.lambda, alpha);
    alpha = MaxStep(it.t, dir.t, alpha);
    alpha = MaxStep(it.nu, dir.nu, alpha);
    return alpha;
  };

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    r_d = qp.hessian * it.d + qp.gradient - qp.a.transpose() * it.lambda;
    r_p = qp.a * it.d + qp.b + it.t - it.s;
    r_t = (VectorXd::Constant(m, rho) - it.lambda - it.nu)
              .cwiseProduct(is_elastic);
    const double mu = (it.s.dot(it.lambda) + it.t.dot(it.nu)) / n_pairs;

    const double dual_res = r_d.lpNorm<Eigen::Infinity>();
    const double primal_res = m > 0 ? r_p.lpNorm<Eigen::Infinity>() : 0.0;
    const double elastic_res = m > 0 ? r_t.lpNorm<Eigen::Infinity>() : 0.0;
    if (dual_res <= options.tolerance * g_scale &&
        primal_res <= options.tolerance * b_scale &&
        elastic_res <= options.tolerance * (1.0 + rho) &&
        mu <= options.tolerance * g_scale) {
      result.converged = true;
      break;
    }

    for (int i = 0; i < m; ++i) {
      double w = it.s(i) / it.lambda(i);
      if (qp.elastic[i]) w += it.t(i) / it.nu(i);
      w_inv(i) = 1.0 / w;
    }
    MatrixXd reduced = qp.hessian;
    reduced.noalias() += qp.a.transpose() * w_inv.asDiagonal() * qp.a;
    llt.compute(reduced);
    if (llt.info() != Eigen::Success) {
      reduced.diagonal().array() +=
          1e-10 * (1.0 + reduced.diagonal().maxCoeff());
      llt.compute(reduced);
      if (llt.info() != Eigen::Success) break;
    }

    // Predictor.
    VectorXd r_sl = -it.s.cwiseProduct(it.lambda);
    VectorXd r_tn = -it.t.cwiseProduct(it.nu);
    const QpDirection aff = solve_direction(r_sl, r_tn);
    const double alpha_aff = max_step(aff);
    const double mu_aff =
        ((it.s + alpha_aff * aff.s).dot(it.lambda + alpha_aff * aff.lambda) +
         (it.t + alpha_aff * aff.t).dot(it.nu + alpha_aff * aff.nu)) /
        n_pairs;
    const double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);

    // Corrector.
    r_sl += VectorXd::Constant(m, sigma * mu) - aff.s.cwiseProduct(aff.lambda);
    r_tn += (VectorXd::Constant(m, sigma * mu) - aff.t.cwiseProduct(aff.nu))
                .cwiseProduct(is_elastic);
    const QpDirection dir = solve_direction(r_sl, r_tn);
    const double alpha = std::min(1.0, 0.99 * max_step(dir));

    it.d += alpha * dir.d;
    it.s += alpha * dir.s;
    it.lambda += alpha * dir.lambda;
    it.t += alpha * dir.t;
    it.nu += alpha * dir.nu;
    if (!it.d.allFinite()) break;
  }

  result.step = it.d;
  result.multipliers = it.lambda;
  result.elastic = it.t;
  return result;
}

// ---------------------------------------------------------------------------
// SQP.

namespace {

struct BoundRow {
  int variable;
  double lower;
};

class SqpDriver {
 public:
  SqpDriver(const DenseProblem& problem, const SqpOptions& options)
      : problem_(problem),
        options_(options),
        n_(problem.num_variables()),
        m_(problem.num_constraints()),
        n_curved_(problem.num_curved_variables()) {
    for (int i = 0; i < n_; ++i) {
      const double lb = problem.LowerBound(i);
      if (std::isfinite(lb)) bounds_.push_back({i, lb});
    }
    elastic_.resize(m_ + bounds_.size(), 0);
    for (int i = 0; i < m_; ++i) elastic_[i] = problem.IsElastic(i) ? 1 : 0;
  }

  SqpResult Run(const VectorXd& z0);

 private:
  bool EvaluateAt(const VectorXd& z, Evaluation* ev) const {
    problem_.Evaluate(z, ev);
    return std::isfinite(ev->objective) && ev->gradient.allFinite() &&
           ev->constraints.allFinite() && ev->jacobian.allFinite();
  }

  VectorXd ClipToBounds(VectorXd z) const {
    for (const BoundRow& b : bounds_) {
      z(b.variable) = std::max(z(b.variable), b.lower);
    }
    return z;
  }

  static double Violation(const Evaluation& ev) {
    return ev.constraints.size() > 0 ? std::max(0.0, -ev.constraints.minCoeff())
                                     : 0.0;
  }

  static double ViolationSum(const Evaluation& ev) {
    return (-ev.constraints).cwiseMax(0.0).sum();
  }

  double Merit(const Evaluation& ev, double penalty) const {
    return ev.objective + penalty * ViolationSum(ev);
  }

  // Lagrangian Hessian for multipliers on `rows` (general rows first, then
  // bound rows), made positive definite.
  bool BuildHessian(const VectorXd& z, const MatrixXd& rows,
                    const VectorXd& multipliers, MatrixXd* hessian) const;

  QpProblem BuildQp(const VectorXd& z, const Evaluation& ev,
                    double penalty) const;

  const DenseProblem& problem_;
  const SqpOptions& options_;
  const int n_;
  const int m_;
  const int n_curved_;
  std::vector<BoundRow> bounds_;
  std::vector<char> elastic_;
};

bool SqpDriver::BuildHessian(const VectorXd& z, const MatrixXd& rows,
                             const VectorXd& multipliers,
                             MatrixXd* hessian) const {
  const VectorXd lambda = multipliers.head(m_);
  Evaluation ev;
  MatrixXd curved(n_curved_, n_curved_);
  for (int j = 0; j < n_curved_; ++j) {
    const double h = options_.hessian_fd_step * std::max(1.0, std::abs(z(j)));
    VectorXd zp = z;
    zp(j) += h;
    if (!EvaluateAt(zp, &ev)) return false;
    VectorXd grad_plus = ev.gradient - ev.jacobian.transpose() * lambda;
    VectorXd zm = z;
    zm(j) -= h;
    if (!EvaluateAt(zm, &ev)) return false;
    VectorXd grad_minus = ev.gradient - ev.jacobian.transpose() * lambda;
    curved.col(j) = (grad_plus - grad_minus).head(n_curved_) / (2.0 * h);
  }
  hessian->setZero(n_, n_);
  hessian->topLeftCorner(n_curved_, n_curved_) =
      0.5 * (curved + curved.transpose());
  for (int i = n_curved_; i < n_; ++i) {
    (*hessian)(i, i) = problem_.FixedCurvature(i);
  }

  // Active constraint terms can make the Lagrangian indefinite even at a
  // strict local minimum. Adding sigma * a a' for active rows leaves the QP
  // step on the active face unchanged and restores convexity in their
  // normal directions; whatever negative curvature is left gets flipped.
  Eigen::SelfAdjointEigenSolver<MatrixXd> raw(*hessian, Eigen::EigenvaluesOnly);
  if (raw.info() != Eigen::Success) return false;
  const double negative = std::max(0.0, -raw.eigenvalues().minCoeff());
  if (negative > 0.0) {
    const double sigma = 10.0 * std::max(1.0, negative);
    const double active_floor =
        1e-8 * (1.0 + multipliers.lpNorm<Eigen::Infinity>());
    for (Eigen::Index i = 0; i < multipliers.size(); ++i) {
      if (multipliers(i) <= active_floor) continue;
      const double norm2 = rows.row(i).squaredNorm();
      if (norm2 <= 1e-20) continue;
      hessian->noalias() +=
          (sigma / norm2) * rows.row(i).transpose() * rows.row(i);
    }
  }

  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(*hessian);
  if (eig.info() != Eigen::Success) return false;
  VectorXd values = eig.eigenvalues().cwiseAbs();
  const double floor = std::max(1e-8, 1e-10 * values.maxCoeff());
  values = values.cwiseMax(floor);
  *hessian =
      eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
  return true;
}

QpProblem SqpDriver::BuildQp(const VectorXd& z, const Evaluation& ev,
                             double penalty) const {
  const int rows = m_ + static_cast<int>(bounds_.size());
  QpProblem qp;
  qp.gradient = ev.gradient;
  qp.a.setZero(rows, n_);
  qp.b.resize(rows);
  qp.a.topRows(m_) = ev.jacobian;
  qp.b.head(m_) = ev.constraints;
  for (size_t k = 0; k < bounds_.size(); ++k) {
    qp.a(m_ + k, bounds_[k].variable) = 1.0;
    qp.b(m_ + k) = z(bounds_[k].variable) - bounds_[k].lower;
  }
  qp.elastic = elastic_;
  qp.penalty = penalty;
  return qp;
}

SqpResult SqpDriver::Run(const VectorXd& z0) {
  SqpResult result;
  VectorXd z = ClipToBounds(z0);
  Evaluation ev;
  if (!EvaluateAt(z, &ev)) {
    result.z = z;
    result.multipliers = VectorXd::Zero(m_);
    result.status = SqpStatus::kNumericalError;
    return result;
  }

  VectorXd lambda = VectorXd::Zero(m_);
  double penalty = options_.initial_penalty;

  // Best iterate: feasible with the lowest objective, else least violation.
  VectorXd best_z = z;
  double best_f = ev.objective;
  double best_viol = Violation(ev);
  auto consider = [&](const VectorXd& zc, const Evaluation& evc) {
    const double viol = Violation(evc);
    const bool feasible = viol <= options_.feasibility_tol;
    const bool best_feasible = best_viol <= options_.feasibility_tol;
    bool better = false;
    if (feasible && best_feasible) {
      better = evc.objective < best_f;
    } else if (feasible != best_feasible) {
      better = feasible;
    } else {
      better = viol < best_viol;
    }
    if (better) {
      best_z = zc;
      best_f = evc.objective;
      best_viol = viol;
    }
  };

  const QpOptions qp_options;
  SqpStatus status = SqpStatus::kMaxIterations;
  int iter = 0;
  double stationarity = 0.0;

  VectorXd qp_multipliers = VectorXd::Zero(m_ + bounds_.size());

  for (; iter < options_.max_iterations; ++iter) {
    QpProblem qp = BuildQp(z, ev, penalty);
    if (!BuildHessian(z, qp.a, qp_multipliers, &qp.hessian)) {
      status = SqpStatus::kNumericalError;
      break;
    }
    QpResult step = SolveQp(qp, qp_options);
    // Steering: raise the elastic price until the step buys a tenth of the
    // linearized feasibility that an unbounded price would.
    double elastic_sum = step.elastic.sum();
    if (elastic_sum > 0.1 * options_.feasibility_tol &&
        penalty < options_.max_penalty) {
      double linear_violation = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (qp.elastic[i]) linear_violation += std::max(0.0, -qp.b(i));
      }
      QpProblem strict = qp;
      strict.penalty = options_.max_penalty;
      const double best_sum = SolveQp(strict, qp_options).elastic.sum();
      const double target = 0.1 * (linear_violation - best_sum);
      while (linear_violation - elastic_sum < target &&
             penalty < options_.max_penalty) {
        penalty = std::min(10.0 * penalty, options_.max_penalty);
        qp.penalty = penalty;
        step = SolveQp(qp, qp_options);
        elastic_sum = step.elastic.sum();
      }
    }
    if (!step.step.allFinite()) {
      status = SqpStatus::kNumericalError;
      break;
    }

    const VectorXd row_multipliers = step.multipliers.head(m_);
    VectorXd kkt = ev.gradient - qp.a.transpose() * step.multipliers;
    stationarity = kkt.lpNorm<Eigen::Infinity>();
    double complementarity = 0.0;
    for (int i = 0; i < qp.b.size(); ++i) {
      complementarity =
          std::max(complementarity, std::abs(step.multipliers(i) * qp.b(i)));
    }
    const double violation = Violation(ev);
    const double dual_scale =
        std::max(100.0, step.multipliers.lpNorm<1>() /
                            std::max<double>(1.0, step.multipliers.size())) /
        100.0;
    if (stationarity <= options_.optimality_tol * dual_scale &&
        complementarity <= options_.optimality_tol * dual_scale &&
        violation <= options_.feasibility_tol) {
      lambda = row_multipliers;
      status = SqpStatus::kConverged;
      break;
    }

    // Exactness needs penalty > |lambda| on rows the QP could satisfy; rows
    // still relaxed carry lambda = penalty and are left to the steering.
    double lambda_max = 0.0;
    for (int i = 0; i < m_; ++i) {
      if (step.elastic(i) <= options_.feasibility_tol) {
        lambda_max = std::max(lambda_max, std::abs(row_multipliers(i)));
      }
    }
    // When the linearization holds without relaxation the price only has to
    // dominate the multipliers; a price left high by earlier steering chokes
    // the line search.
    const double penalty_floor =
        step.elastic.head(m_).sum() <= options_.feasibility_tol
            ? options_.initial_penalty
            : penalty;
    penalty = std::min(std::max(penalty_floor, 1.1 * lambda_max),
                       options_.max_penalty);

    const VectorXd& d = step.step;
    const double merit = Merit(ev, penalty);
    const double model_decrease = ev.gradient.dot(d) +
                                  penalty * step.elastic.head(m_).sum() -
                                  penalty * ViolationSum(ev);
    const double step_norm = d.lpNorm<Eigen::Infinity>();
    const double z_scale = 1.0 + z.lpNorm<Eigen::Infinity>();
    // A feasible point whose QP step is negligible is a KKT point up to the
    // curvature added for convexity, which slows the final active-set change.
    if (violation <= options_.feasibility_tol &&
        step_norm <= 1e-2 * options_.optimality_tol * z_scale) {
      lambda = row_multipliers;
      status = SqpStatus::kConverged;
      break;
    }
    if (model_decrease >= -1e-14 * (1.0 + std::abs(merit)) ||
        step_norm <= 1e-13 * z_scale) {
      lambda = row_multipliers;
      status = violation <= options_.feasibility_tol ? SqpStatus::kConverged
                                                     : SqpStatus::kInfeasible;
      break;
    }

    constexpr double kArmijo = 1e-4;
    Evaluation trial_ev;
    VectorXd trial_z = ClipToBounds(z + d);
    bool accepted =
        EvaluateAt(trial_z, &trial_ev) &&
        Merit(trial_ev, penalty) <= merit + kArmijo * model_decrease;
    if (!accepted && std::isfinite(trial_ev.objective) &&
        trial_ev.constraints.allFinite()) {
      // Second-order correction against the Maratos effect.
      QpProblem soc = qp;
      soc.penalty = penalty;
      soc.b.head(m_) = trial_ev.constraints - ev.jacobian * d;
      const QpResult corrected = SolveQp(soc, qp_options);
      if (corrected.step.allFinite()) {
        trial_z = ClipToBounds(z + corrected.step);
        accepted = EvaluateAt(trial_z, &trial_ev) &&
                   Merit(trial_ev, penalty) <= merit + kArmijo * model_decrease;
      }
    }
    double alpha = 1.0;
    while (!accepted) {
      alpha *= 0.5;
      if (alpha < 1e-10) break;
      trial_z = ClipToBounds(z + alpha * d);
      accepted =
          EvaluateAt(trial_z, &trial_ev) &&
          Merit(trial_ev, penalty) <= merit + kArmijo * alpha * model_decrease;
    }
    if (!accepted) {
      lambda = row_multipliers;
      status = SqpStatus::kLineSearchFailure;
      break;
    }

    z = std::move(trial_z);
    ev = std::move(trial_ev);
    lambda = row_multipliers;
    qp_multipliers = step.multipliers;
    consider(z, ev);
  }

  if (status == SqpStatus::kConverged || status == SqpStatus::kInfeasible) {
    result.z = z;
    result.objective = ev.objective;
    result.max_violation = Violation(ev);
  } else {
    consider(z, ev);
    result.z = best_z;
    result.objective = best_f;
    result.max_violation = best_viol;
  }
  result.multipliers = lambda;
  result.stationarity = stationarity;
  result.iterations = std::min(iter + 1, options_.max_iterations);
  result.status = status;
  return result;
}

}  // namespace

SqpResult SolveSqp(const DenseProblem& problem, const VectorXd& z0,
                   const SqpOptions& options) {
  SqpDriver driver(problem, options);
  return driver.Run(z0);
}

}  // namespace lipnav::nlp
