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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pbgfluor/errors.hpp"
#include "pbgfluor/inversion.hpp"
#include "pbgfluor/mode_oracle.hpp"
#include "pbgfluor/parallel.hpp"

using namespace pbgfluor;
using namespace pbgfluor::inversion;

namespace {

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

}  // namespace

TEST(Contour, SinglePoleWithAndWithoutSubtraction) {
    const cplx s{0.7, -0.4};
    const ContourAnchor anchor{0.7, 4.0, {}};
    const auto t = make_time_grid(8.0, 0.5);
    for (bool subtract : {true, false}) {
        ContourSpec spec;
        spec.asymptote_subtraction = subtract;
        spec.window_halfwidth = subtract ? 200.0 : 4000.0;
        spec.grid_points = subtract ? 4096 : 32768;
        spec.refine_tolerance = 1e-12;
        const SpectralFunction f{[&](cplx z) { return 1.0 / (z - s); },
                                 resolvent::AsymptoticSeries{cplx{0.7, -1.0}, {1.0, s - cplx{0.7, -1.0}, (s - cplx{0.7, -1.0}) * (s - cplx{0.7, -1.0})}}};
        const auto u = invert_contour(f, spec, anchor, t);
        // Without subtraction the truncated 1/x tail costs O(1/(W t)).
        const double tol = subtract ? 1e-8 : 2e-3;
        for (std::size_t j = 1; j < t.size(); ++j)
            EXPECT_NEAR(std::abs(u[j] - std::exp(cplx{0.0, -1.0} * s * t[j])), 0.0, tol)
                << "t = " << t[j] << " subtract = " << subtract;
    }
}

TEST(Contour, BranchPointOnTheAxis) {
    // G(z) = -i Gamma(3/2) (-i (z - s))^{-3/2} inverts to sqrt(t) exp(-i s t).
    const double s = 0.0;
    const double damping = 0.3;
    ContourSpec spec;
    spec.window_halfwidth = 4000.0;
    spec.grid_points = 16384;
    spec.offset = damping;  // keeps the branch point strictly below the contour
    const ContourAnchor anchor{s, 2.0, {s}};
    const SpectralFunction f{[&](cplx z) {
                                 return cplx{0.0, -1.0} * (0.5 * std::sqrt(std::numbers::pi)) *
                                        std::pow(cplx{0.0, -1.0} * (z - s), -1.5);
                             },
                             std::nullopt};
    const auto t = make_time_grid(4.0, 0.5);
    const auto u = invert_contour(f, spec, anchor, t);
    for (std::size_t j = 1; j < t.size(); ++j)
        EXPECT_NEAR(std::abs(u[j] - std::sqrt(t[j])), 0.0, 2e-3 * std::exp(damping * t[j])) << t[j];
}

TEST(Contour, RejectsBadInput) {
    ContourSpec spec;
    spec.grid_points = 1;
    EXPECT_THROW(spec.validate(), DomainError);
    spec = {};
    spec.offset = -1.0;
    EXPECT_THROW(spec.validate(), DomainError);
    const SpectralFunction f{[](cplx z) { return 1.0 / (z - 1.0); }, std::nullopt};
    const std::vector<double> t{-1.0};
    EXPECT_THROW(invert_contour(f, ContourSpec{}, ContourAnchor{}, t), DomainError);
}

TEST(Contour, PoleOnTheContourIsReported) {
    const SpectralFunction f{[](cplx z) { return 1.0 / (z - 0.5); }, std::nullopt};
    ContourSpec spec;
    spec.grid_points = 4097;  // puts a node exactly on the pole
    const ContourAnchor anchor{0.5, 4.0, {}};
    const std::vector<double> t{1.0};
    EXPECT_THROW(invert_contour(f, spec, anchor, t), NumericalError);
}

TEST(Contour, ReproducibleAcrossThreadCounts) {
    const SpectralFunction f{[](cplx z) { return 1.0 / (z - cplx{0.2, -0.3}); }, std::nullopt};
    const auto t = make_time_grid(5.0, 0.1);
    const ContourAnchor anchor{0.0, 4.0, {}};
    const std::size_t saved = worker_threads();
    worker_threads() = 1;
    const auto one = invert_contour(f, ContourSpec{}, anchor, t);
    worker_threads() = 3;
    const auto three = invert_contour(f, ContourSpec{}, anchor, t);
    worker_threads() = saved;
    EXPECT_EQ(one, three);
}

TEST(NoJump, RabiOscillationWithoutDamping) {
    SystemParams p;
    p.gamma = 0.0;
    p.laser_coupling = 0.8;
    ContourSpec spec;
    spec.offset = 0.05;
    spec.refine_tolerance = 1e-12;
    const auto s = nojump_populations(p, resolvent::band_edge_of(p), spec, 10.0, 0.01);
    for (std::size_t j = 0; j < s.size(); ++j) {
        EXPECT_NEAR(s.pi_a[j], std::pow(std::cos(0.8 * s.t[j]), 2), 1e-8);
        EXPECT_NEAR(s.pi_b[j], std::pow(std::sin(0.8 * s.t[j]), 2), 1e-8);
        EXPECT_NEAR(s.norm[j], 1.0, 1e-12);
    }
}

TEST(NoJump, DetunedRabiOscillation) {
    SystemParams p;
    p.gamma = 0.0;
    p.laser_coupling = 0.6;
    p.omega_L = 0.8;
    ContourSpec spec;
    spec.offset = 0.05;
    spec.refine_tolerance = 1e-12;
    const auto s = nojump_populations(p, resolvent::band_edge_of(p), spec, 10.0, 0.05);
    const double omega = std::hypot(0.6, 0.4);  // generalized Rabi frequency
    for (std::size_t j = 0; j < s.size(); ++j)
        EXPECT_NEAR(s.pi_b[j], std::pow(0.6 / omega * std::sin(omega * s.t[j]), 2), 1e-8);
}

TEST(NoJump, FlatReservoirMatchesMatrixExponential) {
    SystemParams p;
    p.gamma = 1.0;
    p.laser_coupling = 1.3;
    p.omega_L = 0.4;
    p.omega_b = -0.2;
    ContourSpec spec;
    spec.refine_tolerance = 1e-12;
    const auto s = nojump_populations(p, resolvent::Flat{0.7}, spec, 10.0, 0.05);
    const auto ref = oracles::two_level_populations(0.4, -0.2, 1.3, 1.7, s.t);
    EXPECT_LT(sup_diff(s.pi_a, ref.pi_a), 1e-8);
    EXPECT_LT(sup_diff(s.pi_b, ref.pi_b), 1e-8);
}

TEST(NoJump, BandEdgeAgreesWithDiscretizedModes) {
    SystemParams p;
    p.pbg_coupling = std::pow(1.0 / 3.0, 1.5);
    const auto s = nojump_populations(p, resolvent::band_edge_of(p), ContourSpec{}, 5.0, 0.01);
    oracle::ModeOracleOptions options;
    options.modes = 1000;
    options.omega_max = 25.0;
    const auto ode = oracle::discretized_modes_oracle(p, options, 5.0, 0.01);
    // Cutoff-limited agreement; see the acceptance run for the convergence study.
    EXPECT_LT(sup_diff(s.pi_b, ode.pi_b), 2e-3);
    EXPECT_LT(sup_diff(s.pi_a, ode.pi_a), 5e-3);
}

TEST(NoJump, ZeroCouplingOracleIsExact) {
    SystemParams p;
    p.pbg_coupling = 0.0;
    p.laser_coupling = 1.0;
    ContourSpec spec;
    spec.refine_tolerance = 1e-12;
    const auto s = nojump_populations(p, resolvent::band_edge_of(p), spec, 10.0, 0.01);
    oracle::ModeOracleOptions options;
    options.modes = 50;
    const auto ode = oracle::discretized_modes_oracle(p, options, 10.0, 0.01);
    EXPECT_LT(sup_diff(s.pi_b, ode.pi_b), 1e-8);
    EXPECT_LT(sup_diff(s.pi_a, ode.pi_a), 1e-8);
}

TEST(NoJump, PopulationsAreConsistent) {
    SystemParams p;
    p.pbg_coupling = std::pow(1.0 / 3.0, 1.5);
    const auto s = nojump_populations(p, resolvent::band_edge_of(p), ContourSpec{}, 30.0, 0.01);
    EXPECT_NEAR(s.pi_a.front(), 1.0, 1e-6);
    EXPECT_NEAR(s.pi_b.front(), 0.0, 1e-10);
    for (std::size_t j = 1; j < s.size(); ++j) {
        EXPECT_LE(s.norm[j], s.norm[j - 1]);
        EXPECT_NEAR(s.pi_a[j] + s.pi_b[j] + s.pi_c[j], s.norm[j], 1e-14);
        EXPECT_GE(s.pi_c[j], -1e-6);
    }
}

TEST(NoJump, CumulativeIntegralIsFourthOrder) {
    const auto error = [](int n) {
        const double h = 4.0 / n;
        std::vector<double> f;
        for (int j = 0; j <= n; ++j) f.push_back(std::sin(j * h));
        const auto integral = cumulative_integral(f, h);
        EXPECT_EQ(integral.front(), 0.0);
        double worst = 0.0;
        for (int j = 0; j <= n; ++j) worst = std::max(worst, std::abs(integral[j] - (1.0 - std::cos(j * h))));
        return worst;
    };
    const double coarse = error(40);
    const double fine = error(80);
    EXPECT_LT(coarse, 1e-5);
    EXPECT_GT(coarse / fine, 12.0);  // 16 for a fourth-order rule
}

TEST(TimeGrid, RoundsDownToWholeSteps) {
    const auto t = make_time_grid(1.0, 0.3);
    ASSERT_EQ(t.size(), 4u);
    EXPECT_DOUBLE_EQ(t.back(), 0.9);
    EXPECT_EQ(make_time_grid(30.0, 0.01).size(), 3001u);
    EXPECT_THROW(make_time_grid(1.0, 0.0), DomainError);
}
