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

#include "pbgfluor/mode_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "pbgfluor/errors.hpp"

namespace pbgfluor::oracle {

namespace {

// Arrowhead Hamiltonian in the laser frame: |a> couples to |b> only, |b>
// couples to every mode, modes are diagonal.
struct ArrowheadHamiltonian {
    cplx e_b;
    double v_ab;
    std::vector<double> e_mode;
    std::vector<double> g_mode;

    // out = -i H psi; psi = [a, b, modes...]
    void derivative(const std::vector<cplx>& psi, std::vector<cplx>& out) const {
        const std::size_t m = e_mode.size();
        const cplx mi{0.0, -1.0};
        cplx hb = v_ab * psi[0] + e_b * psi[1];
        for (std::size_t j = 0; j < m; ++j) {
            hb += g_mode[j] * psi[j + 2];
            out[j + 2] = mi * (g_mode[j] * psi[1] + e_mode[j] * psi[j + 2]);
        }
        out[0] = mi * (v_ab * psi[1]);
        out[1] = mi * hb;
    }

    double spectral_radius_bound() const {
        double bound = std::abs(e_b) + v_ab;
        double g2 = 0.0;
        for (std::size_t j = 0; j < e_mode.size(); ++j) {
            bound = std::max(bound, std::abs(e_mode[j]) + g_mode[j]);
            g2 += g_mode[j] * g_mode[j];
        }
        return bound + std::sqrt(g2);
    }
};

}  // namespace

inversion::NoJumpSolution discretized_modes_oracle(const SystemParams& p, const ModeOracleOptions& options,
                                                   double horizon, double dt) {
    p.validate();
    if (options.modes < 1) throw DomainError("mode oracle: need at least one mode");
    if (!(options.omega_max > p.omega_e)) throw DomainError("mode oracle: omega_max must exceed omega_e");
    if (!(options.max_phase_step > 0.0)) throw DomainError("mode oracle: max_phase_step must be > 0");

    const std::size_t m = options.modes;
    ArrowheadHamiltonian h;
    h.e_b = cplx{p.omega_b - p.omega_L, -0.5 * p.gamma};
    h.v_ab = p.laser_coupling;
    h.e_mode.resize(m);
    h.g_mode.resize(m);
    const double u_max = std::sqrt(options.omega_max - p.omega_e);
    const double du = u_max / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double u0 = du * static_cast<double>(j);
        const double u1 = du * static_cast<double>(j + 1);
        // \int J d omega over the bin, and the J-weighted mean frequency.
        const double weight = 2.0 * p.pbg_coupling / std::numbers::pi * (u1 - u0);
        const double mean_u2 = (u0 * u0 + u0 * u1 + u1 * u1) / 3.0;
        h.g_mode[j] = std::sqrt(weight);
        h.e_mode[j] = p.omega_e + mean_u2 - p.omega_L;
    }

    inversion::NoJumpSolution s;
    s.t = inversion::make_time_grid(horizon, dt);
    const std::size_t nt = s.t.size();
    s.u_aa.resize(nt);
    s.u_ba.resize(nt);
    s.pi_a.resize(nt);
    s.pi_b.resize(nt);
    s.pi_c.resize(nt);
    s.norm.resize(nt);

    const double radius = h.spectral_radius_bound();
    const auto substeps =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(radius * dt / options.max_phase_step)));
    const double step = dt / static_cast<double>(substeps);

    const std::size_t n = m + 2;
    std::vector<cplx> psi(n, cplx{0.0, 0.0}), k1(n), k2(n), k3(n), k4(n), tmp(n);
    psi[0] = 1.0;

    auto record = [&](std::size_t j) {
        // Same phase convention as the inverted closed forms.
        const cplx phase = std::polar(1.0, -p.omega_L * s.t[j]);
        s.u_aa[j] = psi[0] * phase;
        s.u_ba[j] = psi[1] * phase;
        s.pi_a[j] = std::norm(psi[0]);
        s.pi_b[j] = std::norm(psi[1]);
        double c = 0.0;
        for (std::size_t i = 2; i < n; ++i) c += std::norm(psi[i]);
        s.pi_c[j] = c;
        s.norm[j] = s.pi_a[j] + s.pi_b[j] + c;
        if (s.norm[j] > 1.0 + 1e-9 || !std::isfinite(s.norm[j])) {
            std::ostringstream msg;
            msg << "mode oracle: norm grew to " << s.norm[j] << " at t = " << s.t[j]
                << "; reduce max_phase_step";
            throw NumericalError(msg.str());
        }
    };

    record(0);
    for (std::size_t j = 1; j < nt; ++j) {
        for (std::size_t sub = 0; sub < substeps; ++sub) {
            h.derivative(psi, k1);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + 0.5 * step * k1[i];
            h.derivative(tmp, k2);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + 0.5 * step * k2[i];
            h.derivative(tmp, k3);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + step * k3[i];
            h.derivative(tmp, k4);
            for (std::size_t i = 0; i < n; ++i)
                psi[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        record(j);
    }
    s.p_inf_estimate = s.norm.back();
    return s;
}

}  // namespace pbgfluor::oracle
