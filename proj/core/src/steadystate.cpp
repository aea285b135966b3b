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

#include "pbgfluor/steadystate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pbgfluor/errors.hpp"
#include "pbgfluor/parallel.hpp"

namespace pbgfluor::steadystate {

namespace {

using boost::math::quadrature::gauss_kronrod;
using std::numbers::pi;

constexpr unsigned kMaxDepth = 20;

template <class F>
double integrate(F f, double a, double b, double tolerance) {
    double error = 0.0;
    const double value = gauss_kronrod<double, 31>::integrate(f, a, b, kMaxDepth, 1e-11, &error);
    if (!std::isfinite(value) || error > tolerance) {
        std::ostringstream msg;
        msg << "mode integral did not converge on [" << a << ", " << b << "]: error estimate " << error;
        throw NumericalError(msg.str());
    }
    return value;
}

// Breakpoints of the integration range in the natural variable: the laser
// frequency, the bare level and the dressed doublet are where |G_ba|^2 peaks.
std::vector<double> features(const SystemParams& p) {
    const double v = p.laser_coupling;
    return {p.omega_L, p.omega_b, p.omega_L - v, p.omega_L + v, p.omega_b - v, p.omega_b + v};
}

}  // namespace

double p_infinity_mode_integral(const SystemParams& p, const resolvent::ReservoirKind& reservoir, double tolerance) {
    p.validate();
    const double scale = std::max({1.0, p.gamma, p.laser_coupling});

    if (const auto* flat = std::get_if<resolvent::Flat>(&reservoir)) {
        if (flat->rate == 0.0) return 0.0;
        auto integrand = [&](double x) {
            return std::norm(resolvent::resolvent_amplitudes(cplx{x, 0.0}, p, reservoir).g_ba);
        };
        std::vector<double> cuts = features(p);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        double sum = integrate(integrand, -std::numeric_limits<double>::infinity(), cuts.front(), tolerance);
        for (std::size_t i = 1; i < cuts.size(); ++i) sum += integrate(integrand, cuts[i - 1], cuts[i], tolerance);
        sum += integrate(integrand, cuts.back(), std::numeric_limits<double>::infinity(), tolerance);
        return flat->rate / (2.0 * pi) * sum;
    }

    const auto& edge = std::get<resolvent::BandEdge>(reservoir);
    if (edge.coupling == 0.0) return 0.0;
    // omega = omega_e + u^2; J d omega = (2 C / pi) du.
    auto integrand = [&](double u) {
        const double x = edge.omega_e + u * u;
        if (x == edge.omega_e) return 0.0;  // G_ba vanishes at the edge
        return std::norm(resolvent::resolvent_amplitudes(cplx{x, 0.0}, p, reservoir).g_ba);
    };
    std::vector<double> cuts{0.0};
    for (double f : features(p))
        if (f > edge.omega_e) cuts.push_back(std::sqrt(f - edge.omega_e));
    cuts.push_back(std::sqrt(4.0 * scale + std::abs(p.omega_L - edge.omega_e) + std::abs(p.omega_b - edge.omega_e)));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double sum = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i) sum += integrate(integrand, cuts[i - 1], cuts[i], tolerance);
    sum += integrate(integrand, cuts.back(), std::numeric_limits<double>::infinity(), tolerance);
    return 2.0 * edge.coupling / pi * sum;
}

double p_infinity_mode_integral(const SystemParams& p) {
    return p_infinity_mode_integral(p, resolvent::band_edge_of(p));
}

double p_infinity_inversion(const SystemParams& p, const resolvent::ReservoirKind& reservoir,
                            const inversion::ContourSpec& spec, double horizon, const LongTimeGrid& grid) {
    if (!(grid.dt > 0.0) || !(grid.tail_dt > 0.0) || !(grid.transient > 0.0))
        throw DomainError("p_infinity_inversion: time steps and transient must be > 0");
    const double head = std::min(horizon, grid.transient);
    const double p_head = inversion::nojump_populations(p, reservoir, spec, head, grid.dt).p_inf_estimate;
    const auto intervals = static_cast<std::size_t>(std::floor((horizon - head) / grid.tail_dt + 1e-9));
    if (intervals == 0) return p_head;

    // An even number of intervals (the horizon rounds up by at most one tail
    // step), so the tail can be re-integrated at 2h as an error check.
    const std::size_t n = intervals + (intervals % 2) + 1;
    std::vector<double> t(n);
    for (std::size_t j = 0; j < n; ++j) t[j] = head + static_cast<double>(j) * grid.tail_dt;
    const auto u = inversion::nojump_amplitudes(p, reservoir, spec, t).u_ba;
    std::vector<double> fine(n), coarse;
    for (std::size_t j = 0; j < n; ++j) {
        fine[j] = std::norm(u[j]);
        if (j % 2 == 0) coarse.push_back(fine[j]);
    }
    const double tail = inversion::cumulative_integral(fine, grid.tail_dt).back();
    const double check = inversion::cumulative_integral(coarse, 2.0 * grid.tail_dt).back();
    if (p.gamma * std::abs(tail - check) > grid.tail_tolerance) {
        std::ostringstream msg;
        msg << "p_infinity_inversion: tail integral not resolved (|I(h) - I(2h)| = "
            << p.gamma * std::abs(tail - check) << "); reduce tail_dt or raise transient";
        throw NumericalError(msg.str());
    }
    return p_head - p.gamma * tail;
}

std::vector<ScanResult> detuning_scan(const SystemParams& p, std::span<const double> detunings,
                                      std::span<const double> couplings) {
    std::vector<ScanResult> out(couplings.size());
    for (std::size_t v = 0; v < couplings.size(); ++v) {
        out[v].laser_coupling = couplings[v];
        out[v].snapshot = p;
        out[v].snapshot.laser_coupling = couplings[v];
        out[v].snapshot.omega_b = p.omega_e;
        out[v].points.resize(detunings.size());
    }
    const std::size_t total = couplings.size() * detunings.size();
    parallel_for(total, [&](std::size_t idx) {
        const std::size_t v = idx / detunings.size();
        const std::size_t d = idx % detunings.size();
        SystemParams q = out[v].snapshot;
        q.omega_L = p.omega_e + detunings[d];
        const double pinf = p_infinity_mode_integral(q);
        out[v].points[d] = {detunings[d], pinf,
                            pinf > 0.0 ? 1.0 / pinf - 1.0 : std::numeric_limits<double>::infinity()};
    });
    return out;
}

double max_step(const ScanResult& scan) {
    double worst = 0.0;
    for (std::size_t i = 1; i < scan.points.size(); ++i)
        worst = std::max(worst, std::abs(scan.points[i].p_inf - scan.points[i - 1].p_inf));
    return worst;
}

double free_space_branching(double gamma, double gamma_c, double laser_coupling, double omega_L, double omega_b,
                            double horizon, const inversion::ContourSpec& spec, double dt) {
    if (!(gamma_c >= 0.0)) throw DomainError("free_space_branching: gamma' must be >= 0");
    SystemParams p;
    p.gamma = gamma;
    p.laser_coupling = laser_coupling;
    p.pbg_coupling = 0.0;
    p.omega_L = omega_L;
    p.omega_b = omega_b;
    p.omega_e = omega_b;
    return inversion::nojump_populations(p, resolvent::Flat{gamma_c}, spec, horizon, dt).p_inf_estimate;
}

}  // namespace pbgfluor::steadystate
