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

#include "pbgfluor/resolvent.hpp"

#include <cmath>
#include <sstream>

#include "pbgfluor/errors.hpp"

namespace pbgfluor {

void SystemParams::validate(bool allow_lossless) const {
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(gamma) || !finite(laser_coupling) || !finite(pbg_coupling) || !finite(omega_b) ||
        !finite(omega_L) || !finite(omega_e) || !finite(omega_c))
        throw DomainError("system parameters must be finite");
    if (gamma < 0.0) throw DomainError("gamma must be >= 0");
    if (pbg_coupling < 0.0) throw DomainError("pbg coupling C must be >= 0");
    if (laser_coupling < 0.0) throw DomainError("laser coupling V_ab must be >= 0");
    if (!allow_lossless && gamma == 0.0 && pbg_coupling == 0.0)
        throw DomainError("at least one of gamma, C must be positive");
}

namespace resolvent {

namespace {

// Part of B(z) that is regular at infinity: z - omega_b + i gamma / 2, plus
// the constant flat-reservoir damping.
cplx regular_offset(const SystemParams& p, const ReservoirKind& reservoir) {
    cplx q{-p.omega_b, 0.5 * p.gamma};
    if (const auto* flat = std::get_if<Flat>(&reservoir)) q += cplx{0.0, 0.5 * flat->rate};
    return q;
}

}  // namespace

ReservoirKind band_edge_of(const SystemParams& p) { return BandEdge{p.pbg_coupling, p.omega_e}; }

cplx self_energy(cplx z, const ReservoirKind& reservoir) {
    if (z.imag() < 0.0) throw DomainError("self_energy: Im z must be >= 0 on the physical sheet");
    if (const auto* flat = std::get_if<Flat>(&reservoir)) return {0.0, -0.5 * flat->rate};
    const auto& edge = std::get<BandEdge>(reservoir);
    if (edge.coupling == 0.0) return {0.0, 0.0};
    const cplx w = z - edge.omega_e;
    if (w == cplx{0.0, 0.0}) {
        std::ostringstream msg;
        msg << "self_energy: evaluated at the band edge omega_e = " << edge.omega_e;
        throw NumericalError(msg.str());
    }
    // Below the edge w = -|w| + i0 must land on sqrt = +i sqrt(|w|).
    const cplx root = std::sqrt(w.imag() == 0.0 ? cplx{w.real(), +0.0} : w);
    return cplx{0.0, -edge.coupling} / root;
}

Amplitudes resolvent_amplitudes(cplx z, const SystemParams& p, const ReservoirKind& reservoir) {
    cplx bracket = z - p.omega_b + cplx{0.0, 0.5 * p.gamma};
    bracket -= self_energy(z, reservoir);
    const double v2 = p.laser_coupling * p.laser_coupling;
    const cplx denom = (z - p.omega_L) * bracket - v2;
    if (denom == cplx{0.0, 0.0} || !std::isfinite(std::abs(denom))) {
        std::ostringstream msg;
        msg << "resolvent_amplitudes: pole of D(z) at z = " << z;
        throw NumericalError(msg.str());
    }
    return {bracket / denom, p.laser_coupling / denom};
}

cplx AsymptoticSeries::operator()(cplx z) const {
    const cplx inv = 1.0 / (z - center);
    return inv * (coeffs[0] + inv * (coeffs[1] + inv * coeffs[2]));
}

cplx AsymptoticSeries::inverse(double t) const {
    const cplx mit{0.0, -t};
    return std::exp(-cplx{0.0, 1.0} * center * t) * (coeffs[0] + mit * (coeffs[1] + 0.5 * mit * coeffs[2]));
}

// With w = z - s, p = s - omega_L and q = s + regular_offset:
//   G_aa = (w + q) / ((w + p)(w + q) - V^2) = 1/w - p/w^2 + (p^2 + V^2)/w^3 + ...
//   G_ba = V / ((w + p)(w + q) - V^2)       = V/w^2 - V (p + q)/w^3 + ...
// The band-edge term i C / sqrt(z - omega_e) first enters at w^-9/2 and
// w^-7/2 respectively.
AsymptoticSeries asymptote_aa(const SystemParams& p, const ReservoirKind&, cplx center) {
    const cplx pp = center - p.omega_L;
    const double v2 = p.laser_coupling * p.laser_coupling;
    return {center, {cplx{1.0, 0.0}, -pp, pp * pp + v2}};
}

AsymptoticSeries asymptote_ba(const SystemParams& p, const ReservoirKind& reservoir, cplx center) {
    const cplx pp = center - p.omega_L;
    const cplx qq = center + regular_offset(p, reservoir);
    const double v = p.laser_coupling;
    return {center, {cplx{0.0, 0.0}, cplx{v, 0.0}, -v * (pp + qq)}};
}

}  // namespace resolvent
}  // namespace pbgfluor
