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

#include "oracles.hpp"
#include "pbgfluor/errors.hpp"
#include "pbgfluor/steadystate.hpp"

using namespace pbgfluor;
using namespace pbgfluor::steadystate;

TEST(ModeIntegral, MatchesIndependentQuadrature) {
    for (double v : {0.5, 1.0, 3.0})
        for (double delta : {-1.5, 0.0, 0.7}) {
            SystemParams p;
            p.pbg_coupling = 1.0;
            p.laser_coupling = v;
            p.omega_L = delta;
            const double ref = oracles::p_inf_by_quadrature(1.0, v, 1.0, 0.0, delta, 0.0);
            EXPECT_NEAR(p_infinity_mode_integral(p), ref, 1e-9) << "V = " << v << " delta = " << delta;
        }
}

TEST(ModeIntegral, TrappingAtTheReferencePoint) {
    SystemParams p;
    p.pbg_coupling = std::pow(1.0 / 3.0, 1.5);
    const double value = p_infinity_mode_integral(p);
    EXPECT_GT(value, 0.15);
    EXPECT_LT(value, 0.25);
}

TEST(ModeIntegral, FlatReservoirBranchingRatio) {
    SystemParams p;
    p.laser_coupling = 2.0;
    p.omega_L = 0.5;
    for (double rate : {0.5, 1.0, 2.0})
        EXPECT_NEAR(p_infinity_mode_integral(p, resolvent::Flat{rate}), rate / (1.0 + rate), 1e-8);
    EXPECT_EQ(p_infinity_mode_integral(p, resolvent::Flat{0.0}), 0.0);
}

TEST(ModeIntegral, DecreasesWithFreeSpaceDamping) {
    double prev = 1.0;
    for (double gamma : {1.0, 1.5, 2.25, 3.375}) {
        SystemParams p;
        p.gamma = gamma;
        p.pbg_coupling = std::pow(1.0 / 3.0, 1.5);
        const double value = p_infinity_mode_integral(p);
        EXPECT_LT(value, prev);
        prev = value;
    }
}

TEST(ModeIntegral, NoCouplingNoTrapping) {
    SystemParams p;
    p.pbg_coupling = 0.0;
    EXPECT_EQ(p_infinity_mode_integral(p), 0.0);
}

TEST(LongTime, InversionApproachesModeIntegral) {
    SystemParams p;
    p.pbg_coupling = std::pow(1.0 / 3.0, 1.5);
    inversion::ContourSpec spec;
    spec.grid_points = 4096;
    spec.refine_tolerance = 1e-8;
    EXPECT_NEAR(p_infinity_inversion(p, resolvent::band_edge_of(p), spec, 300.0), p_infinity_mode_integral(p), 1e-5);
}

TEST(Scan, StepForWeakDriveSmoothForStrong) {
    SystemParams p;
    p.pbg_coupling = 1.0;
    std::vector<double> deltas;
    for (int i = -30; i <= 30; ++i) deltas.push_back(0.1 * i);
    const std::vector<double> couplings{0.5, 3.0};
    const auto scans = detuning_scan(p, deltas, couplings);
    ASSERT_EQ(scans.size(), 2u);
    EXPECT_GT(max_step(scans[0]), 3.0 * max_step(scans[1]));
    for (const auto& pt : scans[0].points) EXPECT_NEAR(pt.mean_photons, 1.0 / pt.p_inf - 1.0, 1e-12);
    // The weak-drive curve jumps where the laser crosses the band edge.
    const auto& weak = scans[0].points;
    EXPECT_DOUBLE_EQ(weak[30].detuning, 0.0);
    EXPECT_GT(weak[30].p_inf - weak[29].p_inf, 0.5);
    EXPECT_LT(weak.front().p_inf, 0.01);
}

TEST(Scan, DeterministicAssembly) {
    SystemParams p;
    p.pbg_coupling = 1.0;
    const std::vector<double> deltas{-1.0, 0.0, 1.0};
    const std::vector<double> couplings{0.5, 1.0};
    const auto a = detuning_scan(p, deltas, couplings);
    const auto b = detuning_scan(p, deltas, couplings);
    for (std::size_t v = 0; v < a.size(); ++v)
        for (std::size_t d = 0; d < deltas.size(); ++d) {
            EXPECT_EQ(a[v].points[d].p_inf, b[v].points[d].p_inf);
            EXPECT_EQ(a[v].points[d].detuning, deltas[d]);
        }
}

TEST(Branching, FreeSpaceRatio) {
    inversion::ContourSpec spec;
    EXPECT_NEAR(free_space_branching(1.0, 1.0, 1.0, 0.0, 0.0, 40.0, spec), 0.5, 1e-3);
    EXPECT_NEAR(free_space_branching(1.0, 0.0, 1.0, 0.0, 0.0, 40.0, spec), 0.0, 1e-6);
    EXPECT_THROW(free_space_branching(1.0, -1.0, 1.0, 0.0, 0.0, 40.0, spec), DomainError);
}
