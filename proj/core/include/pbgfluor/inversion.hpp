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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pbgfluor/resolvent.hpp"

namespace pbgfluor::inversion {

/// Quadrature settings for the real-axis inversion integral.
struct ContourSpec {
    double window_halfwidth = 400.0;     // W: integrate over [center - W, center + W]
    double offset = 0.0;                 // contour height; results are rescaled by exp(offset t)
    std::size_t grid_points = 8192;      // base nodes, sinh-graded toward the center
    std::size_t edge_refinement = 1024;  // graded nodes on each side of a branch point
    bool asymptote_subtraction = true;
    double core_halfwidth = 0.0;         // grading scale; 0 selects it from the parameters
    double refine_tolerance = 1e-10;     // per-panel bisection target; 0 disables refinement

    void validate() const;
    bool operator==(const ContourSpec&) const = default;
};

/// Where the integrand lives: the grading center, its natural width and the
/// points (branch points) that must never be sampled.
struct ContourAnchor {
    double center = 0.0;
    double core_halfwidth = 4.0;
    std::vector<double> singular_points;
};

/// A resolvent element and, optionally, its large-|z| expansion.
struct SpectralFunction {
    std::function<cplx(cplx)> eval;
    std::optional<resolvent::AsymptoticSeries> asymptote;
};

/// Quadrature nodes actually used, for diagnostics.
struct ContourGrid {
    std::vector<double> nodes;
    std::size_t refined_nodes = 0;
};

/// (1 / 2 pi i) \int G(z) exp(-i z t) dz along Im z = offset, for every
/// function on a shared node set. The expansion part of each function (when
/// subtraction is on) is inverted in closed form; the remainder is
/// integrated with piecewise-linear Filon panels, exact in t for the linear
/// interpolant. Deterministic: identical inputs give bit-identical output.
std::vector<std::vector<cplx>> invert_contour(std::span<const SpectralFunction> functions,
                                              const ContourSpec& spec, const ContourAnchor& anchor,
                                              std::span<const double> t_grid,
                                              ContourGrid* grid_out = nullptr);

/// Single-function convenience overload.
std::vector<cplx> invert_contour(const SpectralFunction& function, const ContourSpec& spec,
                                 const ContourAnchor& anchor, std::span<const double> t_grid);

/// No-jump evolution starting in |a>.
struct NoJumpSolution {
    std::vector<double> t;
    std::vector<cplx> u_aa;
    std::vector<cplx> u_ba;
    std::vector<double> pi_a;
    std::vector<double> pi_b;
    std::vector<double> pi_c;
    std::vector<double> norm;  // P(t), probability of no flat-vacuum emission
    double p_inf_estimate = 1.0;

    double dt() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
    std::size_t size() const { return t.size(); }
};

/// Uniform grid 0, dt, ..., T (T rounded down to a multiple of dt).
std::vector<double> make_time_grid(double horizon, double dt);

/// Accuracy tolerance used for the positivity and closure checks.
inline constexpr double default_population_tolerance = 1e-4;

/// Contour anchor derived from the physical parameters.
ContourAnchor anchor_for(const SystemParams& p, const resolvent::ReservoirKind& reservoir,
                         const ContourSpec& spec);

/// U_aa(t) and U_ba(t) on an arbitrary grid of non-negative times.
struct Amplitudes {
    std::vector<cplx> u_aa;
    std::vector<cplx> u_ba;
};
Amplitudes nojump_amplitudes(const SystemParams& p, const resolvent::ReservoirKind& reservoir,
                             const ContourSpec& spec, std::span<const double> t_grid);

/// Fourth-order running integral of uniformly spaced samples (cubic through
/// four neighbours, one-sided at the ends); falls back to the trapezoid rule
/// below four samples. out[0] = 0.
std::vector<double> cumulative_integral(std::span<const double> f, double h);

/// Inverts G_aa and G_ba, forms the populations, the norm
/// P(t) = 1 - gamma \int pi_b and pi_c = P - pi_a - pi_b. Throws
/// NumericalError when positivity or closure fails by more than `tolerance`.
NoJumpSolution nojump_populations(const SystemParams& p, const resolvent::ReservoirKind& reservoir,
                                  const ContourSpec& spec, double horizon, double dt,
                                  double tolerance = default_population_tolerance);

/// Fills norm, pi_c and p_inf_estimate from u_aa, u_ba (and pi_a, pi_b).
void finish_populations(NoJumpSolution& solution, double gamma);

}  // namespace pbgfluor::inversion
