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

#include "hfree/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hfree {

namespace {

constexpr double kSlopeCap = 1e300;
constexpr double kGammaCeiling = 0.499;
constexpr double kGammaKnee = 0.2495;

double power(double base, double exponent) {
  if (exponent == 0.0) return 1.0;
  return std::pow(base, exponent);
}

}  // namespace

TrajectoryParams TrajectoryParams::make(const ForbiddenGraph& h, Vertex n,
                                        Constants constants) {
  if (n < 3) throw std::invalid_argument("trajectory needs n >= 3");
  if (constants.mu <= 0 || constants.epsilon <= 0 || constants.W <= 0) {
    throw std::invalid_argument("mu, epsilon and W must be positive");
  }
  TrajectoryParams out;
  out.e_h = static_cast<int>(h.e());
  out.aut_h = h.aut_count();
  out.a_h = Rational(4 * out.e_h * (out.e_h - 1),
                     static_cast<std::int64_t>(out.aut_h));
  out.rho = h.rho();
  out.n = n;
  out.mu = constants.mu;
  out.epsilon = constants.epsilon;
  out.W = constants.W;
  out.V = constants.V > 0
              ? constants.V
              : 1.0 + std::max<double>(h.v(), static_cast<double>(h.e() - 1));
  const double dn = n;
  out.p = h.p(dn);
  out.s = out.p * dn * dn;
  out.s_e = std::pow(dn, 1.0 / (2.0 * out.e_h) - out.epsilon);
  out.t_max = out.mu * std::pow(std::log(dn), 1.0 / (out.e_h - 1));
  out.m = static_cast<std::uint64_t>(std::llround(out.t_max * out.s));
  return out;
}

double TrajectoryParams::scale(const ScalingExponent& exponent) const {
  return std::pow(static_cast<double>(n), exponent.to_double());
}

double q_of_t(const TrajectoryParams& params, double t) {
  const double k = 2.0 * params.e_h / static_cast<double>(params.aut_h);
  return std::exp(-k * std::pow(2.0 * t, params.e_h - 1));
}

double c_of_t(const TrajectoryParams& params, double t) {
  return params.a_h.to_double() * power(2.0 * t, params.e_h - 2) *
         q_of_t(params, t);
}

double x_of_t(const TrajectoryParams& params, std::size_t e_gamma,
              std::size_t e_j, double t) {
  return power(2.0 * t, static_cast<double>(e_j)) *
         power(q_of_t(params, t), static_cast<double>(e_gamma - e_j));
}

double p_of_t(const TrajectoryParams& params, double t) {
  return params.W * (std::pow(t, params.e_h - 1) + t);
}

double e_of_t(const TrajectoryParams& params, double t) {
  return std::expm1(p_of_t(params, t));
}

// Linear at slope 40V e^{40V} up to the knee, then a C^1 exponential
// approach to the ceiling.
double gamma_of_t(const TrajectoryParams& params, double t) {
  if (t <= 0) return 0.0;
  const double log_slope = 40.0 * params.V + std::log(40.0 * params.V);
  const double slope =
      log_slope >= std::log(kSlopeCap) ? kSlopeCap : std::exp(log_slope);
  const double line_end = 40.0 * params.V / params.W;
  const double knee = std::min(kGammaKnee, slope * line_end);
  const double t_knee = knee / slope;
  if (t <= t_knee) return slope * t;
  const double room = kGammaCeiling - knee;
  return kGammaCeiling - room * std::exp(-slope * (t - t_knee) / room);
}

double theta_of_t(const TrajectoryParams& params, double t) {
  return 0.5 + gamma_of_t(params, t);
}

EnvelopeRow envelope_row(const TrajectoryParams& params, double t) {
  EnvelopeRow row;
  row.t = t;
  row.q = q_of_t(params, t);
  row.e_t = e_of_t(params, t);
  row.gamma_t = gamma_of_t(params, t);
  row.theta_t = 0.5 + row.gamma_t;
  return row;
}

Envelope envelope(const TrajectoryParams& params, double t,
                  const ScalingExponent& scaling_exp, double x_t) {
  const double rel = e_of_t(params, t) / params.s_e;
  const double abs = theta_of_t(params, t) / params.s_e;
  const double scale = params.scale(scaling_exp);
  Envelope out;
  out.lo = std::max(0.0, 1.0 - rel) * std::max(0.0, x_t - abs) * scale;
  out.hi = (1.0 + rel) * (x_t + abs) * scale;
  return out;
}

namespace {

// Fourth-order central difference.
template <typename F>
double five_point_derivative(F f, double t, double h) {
  return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h);
}

}  // namespace

double ode_residual(const TrajectoryParams& params, std::size_t e_gamma,
                    std::size_t e_j, double t, double step_h) {
  const double derivative = five_point_derivative(
      [&](double u) { return x_of_t(params, e_gamma, e_j, u); }, t, step_h);
  const double gain =
      e_j == 0 ? 0.0
               : 2.0 * static_cast<double>(e_j) *
                     x_of_t(params, e_gamma, e_j - 1, t);
  const double loss = static_cast<double>(e_gamma - e_j) * c_of_t(params, t) *
                      x_of_t(params, e_gamma, e_j, t);
  return std::abs(q_of_t(params, t) * derivative - gain + loss);
}

double q_residual(const TrajectoryParams& params, double t, double step_h) {
  const double derivative = five_point_derivative(
      [&](double u) { return q_of_t(params, u); }, t, step_h);
  return std::abs(derivative + c_of_t(params, t));
}

double martingale_tail(double eta, double N, std::uint64_t m, double a,
                       bool supermartingale) {
  if (!(eta > 0)) throw PreconditionError("martingale_tail: need eta > 0");
  if (!(eta <= N / 10.0)) {
    throw PreconditionError("martingale_tail: need eta <= N/10 (eta = " +
                            std::to_string(eta) +
                            ", N = " + std::to_string(N) + ")");
  }
  if (m < 1) throw PreconditionError("martingale_tail: need m >= 1");
  if (!(a > 0)) throw PreconditionError("martingale_tail: need a > 0");
  const double dm = static_cast<double>(m);
  if (supermartingale && !(a <= eta * dm / 10.0)) {
    throw PreconditionError("martingale_tail: need a <= eta*m/10 (a = " +
                            std::to_string(a) + ", eta*m/10 = " +
                            std::to_string(eta * dm / 10.0) + ")");
  }
  return std::exp(-(a * a) / (3.0 * eta * dm * N));
}

double alpha_bound(const TrajectoryParams& params) {
  const double log_n = std::log(static_cast<double>(params.n));
  return 3.0 / params.mu * std::pow(log_n, 1.0 - 1.0 / (params.e_h - 1)) /
         params.p;
}

ConstantBudget constant_budget(const TrajectoryParams& params) {
  ConstantBudget out;
  out.e_at_tmax = e_of_t(params, params.t_max);
  out.q_inv_v_at_tmax = std::pow(q_of_t(params, params.t_max), -params.V);
  out.n_eps = std::pow(static_cast<double>(params.n), params.epsilon);
  return out;
}

}  // namespace hfree
