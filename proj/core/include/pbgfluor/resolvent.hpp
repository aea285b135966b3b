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

#include <array>
#include <complex>
#include <variant>

namespace pbgfluor {

using cplx = std::complex<double>;

/// Atom, laser and reservoir parameters in natural units (gamma = 1 typical).
/// omega_c is carried for bookkeeping only: the b <-> c transition enters
/// through the placement of omega_e relative to omega_b.
struct SystemParams {
    double gamma = 1.0;           // flat-vacuum decay rate of |b>
    double laser_coupling = 1.0;  // V_ab = g_L, real and >= 0
    double pbg_coupling = 0.0;    // C, frequency^{3/2}
    double omega_b = 0.0;
    double omega_L = 0.0;
    double omega_e = 0.0;
    double omega_c = 0.0;

    /// Throws DomainError on negative rates or couplings, non-finite values,
    /// or when no dissipation channel exists (gamma == C == 0) and
    /// allow_lossless is false.
    void validate(bool allow_lossless = true) const;
};

namespace resolvent {

/// Structured band-edge continuum, Sigma(z) = -i C / sqrt(z - omega_e).
struct BandEdge {
    double coupling;
    double omega_e;
};

/// Memoryless continuum with decay rate `rate`, Sigma(z) = -i rate / 2.
struct Flat {
    double rate;
};

using ReservoirKind = std::variant<BandEdge, Flat>;

/// Band-edge reservoir described by p.pbg_coupling and p.omega_e.
ReservoirKind band_edge_of(const SystemParams& p);

/// Self-energy of the b <-> c continuum on the physical sheet (principal
/// root, Im z >= 0; real-axis values are limits from above). Throws
/// DomainError for Im z < 0 and NumericalError at the branch point itself.
cplx self_energy(cplx z, const ReservoirKind& reservoir);

struct Amplitudes {
    cplx g_aa;
    cplx g_ba;
};

/// Closed-form resolvent elements. With
///   B(z) = z - omega_b + i gamma / 2 - Sigma(z),
///   D(z) = (z - omega_L) B(z) - |V|^2,
/// G_aa = B / D and G_ba = V / D. G_ba is in the lab frame; G_aa is shifted
/// by omega_L, which leaves |U_aa(t)|^2 unchanged.
Amplitudes resolvent_amplitudes(cplx z, const SystemParams& p, const ReservoirKind& reservoir);

/// Large-|z| expansion sum_{n=1..3} coeffs[n-1] / (z - center)^n. Each term
/// has the closed-form inverse coeffs[n-1] (-i t)^{n-1} / (n-1)! exp(-i center t).
struct AsymptoticSeries {
    cplx center;
    std::array<cplx, 3> coeffs;

    cplx operator()(cplx z) const;
    /// Inverse transform for t >= 0 (right limit at t = 0).
    cplx inverse(double t) const;
};

/// Expansions of G_aa and G_ba about `center` (Im center <= 0). The
/// remainders decay as |z|^-4 and |z|^-7/2 respectively.
AsymptoticSeries asymptote_aa(const SystemParams& p, const ReservoirKind& reservoir, cplx center);
AsymptoticSeries asymptote_ba(const SystemParams& p, const ReservoirKind& reservoir, cplx center);

}  // namespace resolvent
}  // namespace pbgfluor
