// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "auralis/numkern/tensor.hpp"

namespace auralis::solvers {

enum class SolverKind { kEuler, kMidpoint, kHeun };
enum class ScheduleKind { kUniform, kEarlySkip, kLateSkip, kSway };

SolverKind parse_solver(const std::string& name);
ScheduleKind parse_schedule(const std::string& name);
std::string to_string(SolverKind kind);
std::string to_string(ScheduleKind kind);

// Model evaluations per macro step.
int evals_per_step(SolverKind kind);

struct Schedule {
  ScheduleKind kind = ScheduleKind::kEarlySkip;
  SolverKind solver = SolverKind::kMidpoint;
  int nfe = 6;
  double coefficient = 0.0;  // sway only
  std::vector<double> grid;  // macro-step boundaries, ends at 1

  [[nodiscard]] int macro_steps() const {
    return static_cast<int>(grid.size()) - 1;
  }
};

// Builds the macro-step grid. Two-evaluation solvers need an even nfe.
//   uniform:    nfe/k equal steps over [0, 1]
//   early_skip: equal steps over [0.5, 1]
//   late_skip:  equal steps over [0, 0.5], then one step to 1
//   sway:       uniform grid warped by t + s * (cos(pi t / 2) - 1 + t)
Schedule make_schedule(ScheduleKind kind, int nfe, SolverKind solver,
                       double coefficient = 0.0);

// Checks the grid invariants; throws ConfigError.
void validate(const Schedule& schedule);

// u(phi, t, eval_index). eval_index runs 0..nfe-1 in call order.
using FieldFn = std::function<numkern::Tensor4(const numkern::Tensor4& phi,
                                               double t, int eval_index)>;

struct Evaluation {
  int index;
  double t;
};

struct SolverRun {
  numkern::Tensor4 phi;
  std::vector<Evaluation> evaluations;
};

// Integrates d(phi)/dt = u from phi(grid[0]) = z to t = 1.
// Euler:          phi += d * u(phi, t)
// midpoint:       v1 = u(phi, t); v2 = u(phi + d v1, t + d);
//                 phi += d (v1 + v2) / 2
// Heun shares the midpoint arithmetic.
// Throws NumericError if the state stops being finite.
SolverRun integrate(const FieldFn& field, const numkern::Tensor4& z,
                    const Schedule& schedule);

}  // namespace auralis::solvers
