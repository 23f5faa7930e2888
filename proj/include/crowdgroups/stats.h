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

// Special functions backing the Granger causality test.

#ifndef CROWDGROUPS_STATS_H_
#define CROWDGROUPS_STATS_H_

namespace crowdgroups {

// I_x(a, b), the regularized incomplete beta function, for a, b > 0 and
// x in [0, 1]. Evaluated by the Lentz continued fraction.
double RegularizedIncompleteBeta(double a, double b, double x);

// P(X <= s) for X ~ F(d1, d2). Returns 0 for s <= 0 and 1 for s = +inf.
double FisherSnedecorCdf(double s, double d1, double d2);

// Density of F(d1, d2) at x > 0.
double FisherSnedecorPdf(double x, double d1, double d2);

}  // namespace crowdgroups

#endif  // CROWDGROUPS_STATS_H_
