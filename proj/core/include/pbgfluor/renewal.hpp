/*
   Copyright 2026 The pbgfluor Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <vector>

#include "pbgfluor/inversion.hpp"

namespace pbgfluor::renewal {

enum class Method { volterra, transform };

/// Ensemble-averaged populations of the three atomic levels.
struct EnsembleSolution {
    std::vector<double> t;
    std::vector<double> pi_a;
    std::vector<double> pi_b;
    std::vector<double> pi_c;
    Method method = Method::volterra;
};

/// Solves pibar_b(t) = pi0_b(t) + gamma \int_0^t pibar_b(s) pi0_b(t - s) ds by
/// trapezoidal time marching, then the passive convolutions for a and c.
/// Requires a uniform grid; throws NumericalError on negative populations
/// beyond `tolerance`.
EnsembleSolution solve_renewal(const inversion::NoJumpSolution& nojump, double gamma,
                               double tolerance = inversion::default_population_tolerance);

/// Same discrete equations solved in the transform domain: damped FFT,
/// closed-form resummation pibar_b = pi0_b / (1 - gamma pi0_b) (with the
/// trapezoid end corrections), inverse FFT.
EnsembleSolution renewal_transform_check(const inversion::NoJumpSolution& nojump, double gamma);

/// Sup-norm residual of the discrete renewal equation for pi_b.
double renewal_residual(const EnsembleSolution& solution, const inversion::NoJumpSolution& nojump, double gamma);

}  // namespace pbgfluor::renewal
