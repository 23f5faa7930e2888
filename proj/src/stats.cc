// Copyright 2026 The Crowdgroups Authors.
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

#include "crowdgroups/stats.h"

#include <cmath>
#include <limits>

#include "crowdgroups/errors.h"

namespace crowdgroups {
namespace {

double LogBeta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for I_x(a, b), modified Lentz. Converges quickly for
// x < (a + 1) / (a + b + 2).
double BetaContinuedFraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

// I_x(a, b) with y = 1 - x supplied separately to keep precision near 1.
double IncompleteBeta(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front = a * std::log(x) + b * std::log(y) - LogBeta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * BetaContinuedFraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * BetaContinuedFraction(b, a, y) / b;
}

}  // namespace

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0) || !(x >= 0.0 && x <= 1.0)) {
    throw ContractError("incomplete beta needs a, b > 0 and x in [0, 1]");
  }
  return IncompleteBeta(a, b, x, 1.0 - x);
}

double FisherSnedecorCdf(double s, double d1, double d2) {
  if (!(d1 > 0) || !(d2 > 0)) throw ContractError("F degrees of freedom must be positive");
  if (std::isnan(s)) throw ContractError("F statistic is NaN");
  if (s <= 0.0) return 0.0;
  if (std::isinf(s)) return 1.0;
  const double denom = d1 * s + d2;
  return IncompleteBeta(0.5 * d1, 0.5 * d2, d1 * s / denom, d2 / denom);
}

double FisherSnedecorPdf(double x, double d1, double d2) {
  if (!(d1 > 0) || !(d2 > 0)) throw ContractError("F degrees of freedom must be positive");
  if (x <= 0.0) return 0.0;
  const double log_pdf = 0.5 * d1 * std::log(d1 * x) + 0.5 * d2 * std::log(d2) -
                         0.5 * (d1 + d2) * std::log(d1 * x + d2) - std::log(x) -
                         LogBeta(0.5 * d1, 0.5 * d2);
  return std::exp(log_pdf);
}

}  // namespace crowdgroups
