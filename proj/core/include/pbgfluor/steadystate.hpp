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

#include <span>
#include <vector>

#include "pbgfluor/inversion.hpp"
#include "pbgfluor/resolvent.hpp"

namespace pbgfluor::steadystate {

/// Trapped population P(inf) = \int J(omega) |G_ba(omega + i0)|^2 d omega.
/// Band edge: J = C / (pi sqrt(omega - omega_e)), integrated in
/// u = sqrt(omega - omega_e) where the integrand is smooth. Flat reservoir:
/// J = rate / (2 pi) over the whole axis. Adaptive Gauss-Kronrod to
/// `tolerance` (absolute); throws NumericalError if it does not converge.
double p_infinity_mode_integral(const SystemParams& p, const resolvent::ReservoirKind& reservoir,
                                double tolerance = 1e-10);
double p_infinity_mode_integral(const SystemParams& p);

/// Time stepping of the long-horizon inversion: a fine grid through the
/// transient, then a coarse grid on which only the slowly relaxing tail of
/// pi_b remains (quasi-bound states at the band edge can live for ~1e3/gamma).
struct LongTimeGrid {
    double transient = 100.0;
    double dt = 0.025;
    double tail_dt = 1.0;
    double tail_tolerance = 1e-4;  // bound on |I(h) - I(2h)| for the tail integral
};

/// P(T) from the no-jump inversion, P(T) = 1 - gamma \int_0^T pi_b.
/// Throws NumericalError when the coarse tail is not resolved.
double p_infinity_inversion(const SystemParams& p, const resolvent::ReservoirKind& reservoir,
                            const inversion::ContourSpec& spec, double horizon, const LongTimeGrid& grid = {});

struct ScanPoint {
    double detuning;  // omega_L - omega_e
    double p_inf;
    double mean_photons;  // 1 / p_inf - 1
};

struct ScanResult {
    double laser_coupling;
    SystemParams snapshot;  // omega_L of the snapshot is irrelevant
    std::vector<ScanPoint> points;
};

/// For every V in `couplings` and delta in `detunings`: omega_b := omega_e,
/// omega_L := omega_e + delta, then P(inf) from the mode integral.
std::vector<ScanResult> detuning_scan(const SystemParams& p, std::span<const double> detunings,
                                      std::span<const double> couplings);

/// Largest |P(delta_{i+1}) - P(delta_i)| along a scan.
double max_step(const ScanResult& scan);

/// P(T) for a Lambda system whose b -> c channel is a flat continuum of rate
/// gamma_c, i.e. the free-space branching ratio gamma_c / (gamma + gamma_c).
double free_space_branching(double gamma, double gamma_c, double laser_coupling, double omega_L, double omega_b,
                            double horizon, const inversion::ContourSpec& spec = {}, double dt = 0.01);

}  // namespace pbgfluor::steadystate
