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

#include "pbgfluor/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "pbgfluor/errors.hpp"
#include "pbgfluor/parallel.hpp"

namespace pbgfluor::inversion {

namespace {

using resolvent::AsymptoticSeries;

constexpr std::size_t kPanelsPerChunk = 1024;
constexpr std::size_t kResyncInterval = 64;
constexpr std::size_t kMaxNodes = std::size_t{1} << 22;
constexpr int kMaxDepth = 48;
constexpr double kMinPanel = 1e-11;
// Graded nodes s +- r (j/n)^4 around a branch point.
constexpr double kEdgeGrading = 4.0;

struct Sampler {
    std::span<const SpectralFunction> functions;
    bool subtract;
    double offset;

    void operator()(double x, std::vector<cplx>& out) const {
        const cplx z{x, offset};
        out.resize(functions.size());
        for (std::size_t i = 0; i < functions.size(); ++i) {
            const auto& fn = functions[i];
            cplx value;
            try {
                value = fn.eval(z);
            } catch (const Error& e) {
                std::ostringstream msg;
                msg << "inversion: integrand evaluation failed at x = " << x << ": " << e.what();
                throw NumericalError(msg.str());
            }
            if (subtract && fn.asymptote) value -= (*fn.asymptote)(z);
            if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
                std::ostringstream msg;
                msg << "inversion: non-finite integrand at x = " << x;
                throw NumericalError(msg.str());
            }
            out[i] = value;
        }
    }
};

std::vector<double> base_nodes(const ContourSpec& spec, const ContourAnchor& anchor) {
    const double c = anchor.center;
    const double w = spec.window_halfwidth;
    const double l = anchor.core_halfwidth;
    const double sigma = std::asinh(w / l);
    const std::size_t n = spec.grid_points;

    std::vector<double> nodes;
    nodes.reserve(n + 2 * spec.edge_refinement * anchor.singular_points.size() + 4);
    for (std::size_t j = 0; j < n; ++j) {
        const double u = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(n - 1);
        nodes.push_back(c + l * std::sinh(sigma * u));
    }
    nodes.front() = c - w;
    nodes.back() = c + w;

    for (double s : anchor.singular_points) {
        if (!(s > c - w && s < c + w)) continue;
        const double radius = std::min({0.25 * l, s - (c - w), (c + w) - s});
        std::erase_if(nodes, [&](double x) { return std::abs(x - s) < radius || x == s; });
        const std::size_t m = spec.edge_refinement;
        for (std::size_t j = 1; j <= m; ++j) {
            const double r = radius * std::pow(static_cast<double>(j) / static_cast<double>(m), kEdgeGrading);
            nodes.push_back(s - r);
            nodes.push_back(s + r);
        }
        if (m == 0) {
            nodes.push_back(s - radius);
            nodes.push_back(s + radius);
        }
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

bool straddles(double x0, double x1, std::span<const double> singular) {
    return std::any_of(singular.begin(), singular.end(), [&](double s) { return x0 < s && s < x1; });
}

struct NodeSet {
    std::vector<double> x;
    std::vector<std::vector<cplx>> values;  // values[node][function]
    std::size_t refined = 0;
};

NodeSet build_nodes(const Sampler& sample, const ContourSpec& spec, const ContourAnchor& anchor) {
    const auto base = base_nodes(spec, anchor);
    NodeSet set;
    set.x.reserve(base.size() * 2);
    set.values.reserve(base.size() * 2);

    std::vector<cplx> f0, f1;
    sample(base.front(), f0);
    set.x.push_back(base.front());
    set.values.push_back(f0);

    struct Panel {
        double x0, x1;
        std::vector<cplx> v0, v1;
        int depth;
    };
    std::vector<Panel> stack;
    std::vector<cplx> mid;
    for (std::size_t k = 1; k < base.size(); ++k) {
        sample(base[k], f1);
        stack.push_back({base[k - 1], base[k], set.values.back(), f1, 0});
        while (!stack.empty()) {
            Panel panel = std::move(stack.back());
            stack.pop_back();
            const double h = panel.x1 - panel.x0;
            bool split = false;
            if (spec.refine_tolerance > 0.0 && panel.depth < kMaxDepth && h > kMinPanel &&
                !straddles(panel.x0, panel.x1, anchor.singular_points)) {
                const double xm = 0.5 * (panel.x0 + panel.x1);
                sample(xm, mid);
                double dev = 0.0;
                for (std::size_t i = 0; i < mid.size(); ++i)
                    dev = std::max(dev, std::abs(mid[i] - 0.5 * (panel.v0[i] + panel.v1[i])));
                if (h * dev > spec.refine_tolerance) {
                    split = true;
                    // Right half first so the left half is processed next.
                    stack.push_back({xm, panel.x1, mid, std::move(panel.v1), panel.depth + 1});
                    stack.push_back({panel.x0, xm, std::move(panel.v0), mid, panel.depth + 1});
                    ++set.refined;
                }
            }
            if (!split) {
                set.x.push_back(panel.x1);
                set.values.push_back(std::move(panel.v1));
                if (set.x.size() > kMaxNodes)
                    throw NumericalError(
                        "inversion: node budget exhausted; raise refine_tolerance or check for poles on the contour "
                        "(use a positive offset)");
            }
        }
    }
    return set;
}

bool is_uniform(std::span<const double> t) {
    if (t.size() < 3) return true;
    const double dt = t[1] - t[0];
    const double scale = std::max(std::abs(t.front()), std::abs(t.back()));
    for (std::size_t j = 0; j < t.size(); ++j) {
        if (std::abs(t[j] - (t[0] + static_cast<double>(j) * dt)) > 1e-12 * std::max(1.0, scale)) return false;
    }
    return true;
}

}  // namespace

void ContourSpec::validate() const {
    if (!(window_halfwidth > 0.0) || !std::isfinite(window_halfwidth))
        throw DomainError("contour: window_halfwidth must be > 0");
    if (!(offset >= 0.0) || !std::isfinite(offset)) throw DomainError("contour: offset must be >= 0");
    if (grid_points < 2) throw DomainError("contour: grid_points must be >= 2");
    if (!(core_halfwidth >= 0.0)) throw DomainError("contour: core_halfwidth must be >= 0");
    if (!(refine_tolerance >= 0.0)) throw DomainError("contour: refine_tolerance must be >= 0");
}

std::vector<std::vector<cplx>> invert_contour(std::span<const SpectralFunction> functions,
                                              const ContourSpec& spec, const ContourAnchor& anchor,
                                              std::span<const double> t_grid, ContourGrid* grid_out) {
    spec.validate();
    if (!(anchor.core_halfwidth > 0.0)) throw DomainError("contour: anchor core_halfwidth must be > 0");
    for (double t : t_grid)
        if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("inversion: time grid must be finite and >= 0");

    const Sampler sample{functions, spec.asymptote_subtraction, spec.offset};
    const NodeSet nodes = build_nodes(sample, spec, anchor);
    if (grid_out) {
        grid_out->nodes = nodes.x;
        grid_out->refined_nodes = nodes.refined;
    }

    const std::size_t nf = functions.size();
    const std::size_t nt = t_grid.size();
    const std::size_t panels = nodes.x.size() - 1;
    const std::size_t chunks = (panels + kPanelsPerChunk - 1) / kPanelsPerChunk;
    const bool uniform = is_uniform(t_grid);
    const double dt = nt > 1 ? t_grid[1] - t_grid[0] : 0.0;

    // partial[chunk][function * nt + j]
    std::vector<std::vector<cplx>> partial(chunks);
    parallel_for(chunks, [&](std::size_t chunk) {
        const std::size_t first = chunk * kPanelsPerChunk;
        const std::size_t last = std::min(panels, first + kPanelsPerChunk);
        const std::size_t m = last - first;
        // Structure of arrays so the panel loop vectorizes.
        std::vector<double> xm(m), hh(m), inv_hh(m);
        std::vector<double> a_re(m * nf), a_im(m * nf), d_re(m * nf), d_im(m * nf);
        std::vector<double> em_re(m), em_im(m), eb_re(m), eb_im(m);
        std::vector<double> sm_re(m), sm_im(m), sb_re(m), sb_im(m);
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t p = first + k;
            xm[k] = 0.5 * (nodes.x[p] + nodes.x[p + 1]);
            hh[k] = 0.5 * (nodes.x[p + 1] - nodes.x[p]);
            inv_hh[k] = 1.0 / hh[k];
            for (std::size_t i = 0; i < nf; ++i) {
                const cplx avg = 0.5 * (nodes.values[p][i] + nodes.values[p + 1][i]);
                const cplx diff = 0.5 * (nodes.values[p + 1][i] - nodes.values[p][i]);
                a_re[i * m + k] = avg.real();
                a_im[i * m + k] = avg.imag();
                d_re[i * m + k] = diff.real();
                d_im[i * m + k] = diff.imag();
            }
            sm_re[k] = std::cos(xm[k] * dt);
            sm_im[k] = -std::sin(xm[k] * dt);
            sb_re[k] = std::cos(hh[k] * dt);
            sb_im[k] = -std::sin(hh[k] * dt);
        }
        auto& out = partial[chunk];
        out.assign(nf * nt, cplx{0.0, 0.0});
        std::vector<double> s0(m), s1(m);
        for (std::size_t j = 0; j < nt; ++j) {
            const double t = t_grid[j];
            if (!uniform || j % kResyncInterval == 0) {
                for (std::size_t k = 0; k < m; ++k) {
                    em_re[k] = std::cos(xm[k] * t);
                    em_im[k] = -std::sin(xm[k] * t);
                    eb_re[k] = std::cos(hh[k] * t);
                    eb_im[k] = -std::sin(hh[k] * t);
                }
            }
            const double inv_t = t > 0.0 ? 1.0 / t : 0.0;
            double* __restrict s0p = s0.data();
            double* __restrict s1p = s1.data();
            const double* __restrict hp = hh.data();
            const double* __restrict ihp = inv_hh.data();
            const double* __restrict ebr = eb_re.data();
            const double* __restrict ebi = eb_im.data();
#pragma omp simd
            for (std::size_t k = 0; k < m; ++k) {
                const double b = hp[k] * t;
                const double cos_b = ebr[k], sin_b = -ebi[k];
                // Both branches are evaluated so the loop stays branch-free.
                const double b2 = b * b;
                const double series0 =
                    1.0 - b2 * (1.0 / 6.0) * (1.0 - b2 * (1.0 / 20.0) * (1.0 - b2 * (1.0 / 42.0) * (1.0 - b2 * (1.0 / 72.0))));
                const double series1 =
                    b * (1.0 / 3.0) * (1.0 - b2 * (1.0 / 10.0) * (1.0 - b2 * (1.0 / 28.0) * (1.0 - b2 * (1.0 / 54.0))));
                const double inv_b = ihp[k] * inv_t;
                const bool small = b < 0.1;  // b >= 0
                const double m0 = small ? series0 : sin_b * inv_b;
                const double m1 = small ? series1 : (sin_b - b * cos_b) * inv_b * inv_b;
                s0p[k] = hp[k] * m0;
                s1p[k] = hp[k] * m1;
            }
            for (std::size_t i = 0; i < nf; ++i) {
                const double* ar = &a_re[i * m];
                const double* ai = &a_im[i * m];
                const double* dr = &d_re[i * m];
                const double* di = &d_im[i * m];
                const double* er = em_re.data();
                const double* ei = em_im.data();
                double acc_re = 0.0, acc_im = 0.0;
                // The simd reduction order is fixed at compile time, so results stay reproducible.
#pragma omp simd reduction(+ : acc_re, acc_im)
                for (std::size_t k = 0; k < m; ++k) {
                    const double vr = ar[k] * s0p[k] + di[k] * s1p[k];
                    const double vi = ai[k] * s0p[k] - dr[k] * s1p[k];
                    acc_re += er[k] * vr - ei[k] * vi;
                    acc_im += er[k] * vi + ei[k] * vr;
                }
                out[i * nt + j] = cplx{acc_re, acc_im};
            }
            if (uniform) {
                for (std::size_t k = 0; k < m; ++k) {
                    const double er = em_re[k] * sm_re[k] - em_im[k] * sm_im[k];
                    em_im[k] = em_re[k] * sm_im[k] + em_im[k] * sm_re[k];
                    em_re[k] = er;
                    const double br = eb_re[k] * sb_re[k] - eb_im[k] * sb_im[k];
                    eb_im[k] = eb_re[k] * sb_im[k] + eb_im[k] * sb_re[k];
                    eb_re[k] = br;
                }
            }
        }
    });

    std::vector<std::vector<cplx>> result(nf, std::vector<cplx>(nt, cplx{0.0, 0.0}));
    const cplx prefactor = cplx{0.0, 2.0} / (2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < nf; ++i) {
        for (std::size_t j = 0; j < nt; ++j) {
            cplx sum{0.0, 0.0};
            for (std::size_t chunk = 0; chunk < chunks; ++chunk) sum += partial[chunk][i * nt + j];
            const double t = t_grid[j];
            cplx value = prefactor * sum * std::exp(spec.offset * t);
            if (spec.asymptote_subtraction && functions[i].asymptote) value += functions[i].asymptote->inverse(t);
            if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
                throw NumericalError("inversion: non-finite quadrature result");
            result[i][j] = value;
        }
    }
    return result;
}

std::vector<cplx> invert_contour(const SpectralFunction& function, const ContourSpec& spec,
                                 const ContourAnchor& anchor, std::span<const double> t_grid) {
    return std::move(invert_contour(std::span<const SpectralFunction>(&function, 1), spec, anchor, t_grid).front());
}

std::vector<double> make_time_grid(double horizon, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("time grid: dt must be > 0");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("time grid: horizon must be > 0");
    const auto steps = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
    std::vector<double> t(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j) t[j] = static_cast<double>(j) * dt;
    return t;
}

ContourAnchor anchor_for(const SystemParams& p, const resolvent::ReservoirKind& reservoir,
                         const ContourSpec& spec) {
    ContourAnchor anchor;
    anchor.center = p.omega_L;
    double scale = p.laser_coupling + std::abs(p.omega_L - p.omega_b) + p.gamma;
    if (const auto* edge = std::get_if<resolvent::BandEdge>(&reservoir)) {
        scale += std::abs(p.omega_L - edge->omega_e) + std::cbrt(edge->coupling * edge->coupling);
        if (edge->coupling > 0.0) anchor.singular_points.push_back(edge->omega_e);
    } else {
        scale += std::get<resolvent::Flat>(reservoir).rate;
    }
    anchor.core_halfwidth = spec.core_halfwidth > 0.0 ? spec.core_halfwidth : std::max(4.0, 2.0 * scale);
    return anchor;
}

std::vector<double> cumulative_integral(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) {
        double panel = 0.5 * (f[j - 1] + f[j]);
        if (n >= 4) {
            if (j == 1)
                panel = (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]) / 24.0;
            else if (j == n - 1)
                panel = (f[j - 3] - 5.0 * f[j - 2] + 19.0 * f[j - 1] + 9.0 * f[j]) / 24.0;
            else
                panel = (-f[j - 2] + 13.0 * f[j - 1] + 13.0 * f[j] - f[j + 1]) / 24.0;
        }
        out[j] = out[j - 1] + h * panel;
    }
    return out;
}

void finish_populations(NoJumpSolution& s, double gamma) {
    const std::size_t n = s.t.size();
    s.norm.assign(n, 1.0);
    s.pi_c.assign(n, 0.0);
    if (n > 1) {
        // pi_b >= 0, so P must not increase; a rising step can only be the
        // negative weights of the rule acting on round-off and is flattened.
        const auto integral = cumulative_integral(s.pi_b, s.t[1] - s.t[0]);
        for (std::size_t j = 1; j < n; ++j)
            s.norm[j] = std::min(s.norm[j - 1], 1.0 - gamma * integral[j]);
    }
    for (std::size_t j = 0; j < n; ++j) s.pi_c[j] = s.norm[j] - s.pi_a[j] - s.pi_b[j];
    s.p_inf_estimate = n ? s.norm.back() : 1.0;
}

Amplitudes nojump_amplitudes(const SystemParams& p, const resolvent::ReservoirKind& reservoir,
                             const ContourSpec& spec, std::span<const double> t_grid) {
    p.validate();
    const ContourAnchor anchor = anchor_for(p, reservoir, spec);
    const cplx center{anchor.center, -0.25 * anchor.core_halfwidth};
    const std::array<SpectralFunction, 2> functions{
        SpectralFunction{[&](cplx z) { return resolvent::resolvent_amplitudes(z, p, reservoir).g_aa; },
                         resolvent::asymptote_aa(p, reservoir, center)},
        SpectralFunction{[&](cplx z) { return resolvent::resolvent_amplitudes(z, p, reservoir).g_ba; },
                         resolvent::asymptote_ba(p, reservoir, center)},
    };
    auto amplitudes = invert_contour(functions, spec, anchor, t_grid);
    return {std::move(amplitudes[0]), std::move(amplitudes[1])};
}

NoJumpSolution nojump_populations(const SystemParams& p, const resolvent::ReservoirKind& reservoir,
                                  const ContourSpec& spec, double horizon, double dt, double tolerance) {
    NoJumpSolution s;
    s.t = make_time_grid(horizon, dt);
    auto amplitudes = nojump_amplitudes(p, reservoir, spec, s.t);
    s.u_aa = std::move(amplitudes.u_aa);
    s.u_ba = std::move(amplitudes.u_ba);
    s.pi_a.resize(s.t.size());
    s.pi_b.resize(s.t.size());
    for (std::size_t j = 0; j < s.t.size(); ++j) {
        s.pi_a[j] = std::norm(s.u_aa[j]);
        s.pi_b[j] = std::norm(s.u_ba[j]);
    }
    finish_populations(s, p.gamma);

    for (std::size_t j = 0; j < s.t.size(); ++j) {
        const bool ok = s.pi_a[j] <= 1.0 + tolerance && s.pi_b[j] <= 1.0 + tolerance &&
                        s.pi_c[j] >= -tolerance && s.norm[j] >= -tolerance;
        if (!ok) {
            std::ostringstream msg;
            msg << "nojump_populations: population invariant violated at t = " << s.t[j] << " (pi_a = " << s.pi_a[j]
                << ", pi_b = " << s.pi_b[j] << ", pi_c = " << s.pi_c[j] << ", P = " << s.norm[j]
                << "); refine the contour (grid_points, refine_tolerance, window_halfwidth)";
            throw NumericalError(msg.str());
        }
    }
    if (std::abs(s.pi_a.front() - 1.0) > tolerance)
        throw NumericalError("nojump_populations: pi_a(0) deviates from 1; refine the contour");
    return s;
}

}  // namespace pbgfluor::inversion
