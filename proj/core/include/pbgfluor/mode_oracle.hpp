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

#include <cstddef>

#include "pbgfluor/inversion.hpp"
#include "pbgfluor/resolvent.hpp"

namespace pbgfluor::oracle {

struct ModeOracleOptions {
    std::size_t modes = 2000;
    double omega_max = 100.0;  // upper end of the discretized band (absolute frequency)
    /// Largest |eigenfrequency| * step allowed for the RK4 stepper.
    double max_phase_step = 0.05;
};

/// Replaces the band-edge continuum by `modes` discrete modes above omega_e
/// (uniform bins in sqrt(omega - omega_e), weights from the spectral density
/// C / (pi sqrt(omega - omega_e))) and integrates the resulting non-hermitian
/// Schroedinger equation for |a>, |b>, {|c, 1_j>} with classical RK4 in the
/// laser frame. P(t) is the squared norm of the state, not the integrated
/// loss law. Throws NumericalError if the norm grows.
inversion::NoJumpSolution discretized_modes_oracle(const SystemParams& p, const ModeOracleOptions& options,
                                                   double horizon, double dt);

}  // namespace pbgfluor::oracle
