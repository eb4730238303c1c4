// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/solvers/solvers.hpp"

#include <cmath>
#include <numbers>

#include "auralis/errors.hpp"

namespace auralis::solvers {
namespace {

std::vector<double> linspace(double a, double b, int steps) {
  std::vector<double> g(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    g[i] = a + (b - a) * static_cast<double>(i) / steps;
  }
  g.back() = b;
  return g;
}

void axpy(numkern::Tensor4& y, float a, const numkern::Tensor4& x) {
  float* dst = y.data();
  const float* src = x.data();
  for (std::size_t i = 0; i < y.numel(); ++i) dst[i] += a * src[i];
}

void check_finite(const numkern::Tensor4& t, int step, double time) {
  if (!t.all_finite()) {
    throw NumericError("solver state became non-finite at macro step " +
                       std::to_string(step) + " (t=" + std::to_string(time) +
                       ")");
  }
}

}  // namespace

SolverKind parse_solver(const std::string& name) {
  if (name == "euler") return SolverKind::kEuler;
  if (name == "midpoint" || name == "midpoint_alg2") {
    return SolverKind::kMidpoint;
  }
  if (name == "heun") return SolverKind::kHeun;
  throw ConfigError("unknown solver '" + name + "'");
}

ScheduleKind parse_schedule(const std::string& name) {
  if (name == "uniform") return ScheduleKind::kUniform;
  if (name == "early_skip") return ScheduleKind::kEarlySkip;
  if (name == "late_skip") return ScheduleKind::kLateSkip;
  if (name == "sway") return ScheduleKind::kSway;
  throw ConfigError("unknown schedule '" + name + "'");
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kEuler: return "euler";
    case SolverKind::kMidpoint: return "midpoint";
    case SolverKind::kHeun: return "heun";
  }
  return "?";
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kUniform: return "uniform";
    case ScheduleKind::kEarlySkip: return "early_skip";
    case ScheduleKind::kLateSkip: return "late_skip";
    case ScheduleKind::kSway: return "sway";
  }
  return "?";
}

int evals_per_step(SolverKind kind) {
  return kind == SolverKind::kEuler ? 1 : 2;
}

Schedule make_schedule(ScheduleKind kind, int nfe, SolverKind solver,
                       double coefficient) {
  if (nfe < 1) throw ConfigError("nfe must be >= 1");
  const int per = evals_per_step(solver);
  if (nfe % per != 0) {
    throw ConfigError(to_string(solver) + " needs an even nfe, got " +
                      std::to_string(nfe));
  }
  if (kind == ScheduleKind::kSway && std::abs(coefficient) > 1.0) {
    throw ConfigError("sway coefficient must lie in [-1, 1]");
  }
  Schedule s;
  s.kind = kind;
  s.solver = solver;
  s.nfe = nfe;
  s.coefficient = coefficient;
  const int steps = nfe / per;
  switch (kind) {
    case ScheduleKind::kUniform:
      s.grid = linspace(0.0, 1.0, steps);
      break;
    case ScheduleKind::kEarlySkip:
      s.grid = linspace(0.5, 1.0, steps);
      break;
    case ScheduleKind::kLateSkip:
      if (steps == 1) {
        s.grid = {0.0, 1.0};
      } else {
        s.grid = linspace(0.0, 0.5, steps - 1);
        s.grid.push_back(1.0);
      }
      break;
    case ScheduleKind::kSway:
      s.grid = linspace(0.0, 1.0, steps);
      for (double& t : s.grid) {
        t += coefficient * (std::cos(std::numbers::pi * t / 2.0) - 1.0 + t);
      }
      s.grid.front() = 0.0;
      s.grid.back() = 1.0;
      break;
  }
  validate(s);
  return s;
}

void validate(const Schedule& s) {
  if (s.grid.size() < 2) throw ConfigError("schedule grid needs two points");
  if (s.grid.back() != 1.0) throw ConfigError("schedule must end at t = 1");
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    if (s.grid[i] < 0.0 || s.grid[i] > 1.0) {
      throw ConfigError("schedule point outside [0, 1]");
    }
    if (i > 0 && !(s.grid[i] > s.grid[i - 1])) {
      throw ConfigError("schedule grid is not strictly increasing");
    }
  }
  if (s.macro_steps() * evals_per_step(s.solver) != s.nfe) {
    throw ConfigError("schedule grid does not match nfe");
  }
}

SolverRun integrate(const FieldFn& field, const numkern::Tensor4& z,
                    const Schedule& schedule) {
  validate(schedule);
  SolverRun run;
  run.phi = z;
  int index = 0;
  auto eval = [&](const numkern::Tensor4& phi, double t) {
    run.evaluations.push_back({index, t});
    numkern::Tensor4 v = field(phi, t, index++);
    if (!(v.shape() == phi.shape())) {
      throw ConfigError("field output shape " + v.shape().str() +
                        " != state shape " + phi.shape().str());
    }
    return v;
  };
  for (int k = 0; k < schedule.macro_steps(); ++k) {
    const double t = schedule.grid[k];
    const double t_next = schedule.grid[k + 1];
    const auto d = static_cast<float>(t_next - t);
    const numkern::Tensor4 v1 = eval(run.phi, t);
    if (schedule.solver == SolverKind::kEuler) {
      axpy(run.phi, d, v1);
    } else {
      numkern::Tensor4 pred = run.phi;
      axpy(pred, d, v1);
      const numkern::Tensor4 v2 = eval(pred, t_next);
      float* dst = run.phi.data();
      const float* a = v1.data();
      const float* b = v2.data();
      for (std::size_t i = 0; i < run.phi.numel(); ++i) {
        dst[i] += d * ((a[i] + b[i]) * 0.5f);
      }
    }
    check_finite(run.phi, k, t_next);
  }
  return run;
}

}  // namespace auralis::solvers
