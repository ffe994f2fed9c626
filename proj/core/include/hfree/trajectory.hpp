// Copyright 2026 The hfree Authors
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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>

#include "hfree/rational.hpp"
#include "hfree/structure.hpp"

namespace hfree {

// Free constants of the analysis. V <= 0 means "derive from the pattern
// catalogue" (see default_v).
struct Constants {
  double mu = 0.1;
  double epsilon = 0.01;
  double W = 10.0;
  double V = 0.0;
};

class TrajectoryParams {
 public:
  static TrajectoryParams make(const ForbiddenGraph& h, Vertex n,
                               Constants constants);

  int e_h = 0;
  std::uint64_t aut_h = 0;
  Rational a_h;  // 4 e_H (e_H - 1) / aut(H)
  Rational rho;
  Vertex n = 0;
  double V = 0, W = 0, epsilon = 0, mu = 0;

  double p = 0;      // n^{-rho}
  double s = 0;      // p n^2
  double s_e = 0;    // n^{1/(2 e_H) - epsilon}
  double t_max = 0;  // mu (log n)^{1/(e_H - 1)}
  std::uint64_t m = 0;

  // n^exponent as a double.
  double scale(const ScalingExponent& exponent) const;
};

double q_of_t(const TrajectoryParams& params, double t);
double c_of_t(const TrajectoryParams& params, double t);
// (2t)^{e_J} q(t)^{e_Gamma - e_J}; x(0) is 1 when e_J = 0.
double x_of_t(const TrajectoryParams& params, std::size_t e_gamma,
              std::size_t e_j, double t);

double p_of_t(const TrajectoryParams& params, double t);  // W (t^{e_H-1} + t)
double e_of_t(const TrajectoryParams& params, double t);  // e^{P(t)} - 1
double gamma_of_t(const TrajectoryParams& params, double t);
double theta_of_t(const TrajectoryParams& params, double t);

struct EnvelopeRow {
  double t = 0, q = 0, e_t = 0, theta_t = 0, gamma_t = 0;
};
EnvelopeRow envelope_row(const TrajectoryParams& params, double t);

struct Envelope {
  double lo = 0;
  double hi = 0;
};

// (1 -+ e/s_e)(x -+ theta/s_e) n^{scaling_exp}; each lower factor is
// clamped at 0.
Envelope envelope(const TrajectoryParams& params, double t,
                  const ScalingExponent& scaling_exp, double x_t);

// |q x' - 2 sum_{e in J} x_{J\e} + (e_Gamma - e_J) c x| with x' by the
// five-point central difference of spacing step_h.
double ode_residual(const TrajectoryParams& params, std::size_t e_gamma,
                    std::size_t e_j, double t, double step_h);
// |q' + c| with q' by the same stencil.
double q_residual(const TrajectoryParams& params, double t, double step_h);

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// exp(-a^2 / (3 eta m N)). Requires eta <= N/10, m >= 1, a > 0, and with
// `supermartingale` also a <= eta m / 10.
double martingale_tail(double eta, double N, std::uint64_t m, double a,
                       bool supermartingale = false);

// 3 mu^{-1} (log n)^{1 - 1/(e_H - 1)} p^{-1}.
double alpha_bound(const TrajectoryParams& params);

// Whether e(t_max) and q(t_max)^{-V} are both at most n^epsilon, the
// finite-n reading of the constants' ordering.
struct ConstantBudget {
  double e_at_tmax = 0;
  double q_inv_v_at_tmax = 0;
  double n_eps = 0;
  bool holds() const { return e_at_tmax <= n_eps && q_inv_v_at_tmax <= n_eps; }
};
ConstantBudget constant_budget(const TrajectoryParams& params);

}  // namespace hfree
