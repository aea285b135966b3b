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
#include "pbgfluor/inversion.hpp"
#include "pbgfluor/renewal.hpp"

using namespace pbgfluor;

namespace {

const inversion::NoJumpSolution& trapping_solution() {
    static const auto s = [] {
        SystemParams p;
        p.pbg_coupling = std::pow(1.0 / 3.0, 1.5);
        return inversion::nojump_populations(p, resolvent::band_edge_of(p), {}, 30.0, 0.01);
    }();
    return s;
}

}  // namespace

TEST(Renewal, FlatReservoirMatchesMasterEquation) {
    SystemParams p;
    p.gamma = 1.0;
    p.laser_coupling = 1.2;
    p.omega_L = 0.3;
    const double gamma_c = 0.5;
    const auto s = inversion::nojump_populations(p, resolvent::Flat{gamma_c}, {}, 15.0, 0.005);
    const auto r = renewal::solve_renewal(s, p.gamma);
    std::vector<double> t;
    for (std::size_t j = 0; j < s.size(); j += 100) t.push_back(s.t[j]);
    const auto ref = oracles::lindblad_populations(p.gamma, gamma_c, 1.2, 0.3, 0.0, t);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const std::size_t j = i * 100;
        EXPECT_NEAR(r.pi_a[j], ref.pi_a[i], 2e-5) << "t = " << t[i];
        EXPECT_NEAR(r.pi_b[j], ref.pi_b[i], 2e-5) << "t = " << t[i];
        EXPECT_NEAR(r.pi_c[j], ref.pi_c[i], 2e-5) << "t = " << t[i];
    }
}

TEST(Renewal, ResidualAtRoundOff) {
    const auto& s = trapping_solution();
    const auto r = renewal::solve_renewal(s, 1.0);
    EXPECT_LT(renewal::renewal_residual(r, s, 1.0), 1e-12);
}

TEST(Renewal, TransformCheckAgrees) {
    const auto& s = trapping_solution();
    const auto r = renewal::solve_renewal(s, 1.0);
    const auto f = renewal::renewal_transform_check(s, 1.0);
    EXPECT_EQ(f.method, renewal::Method::transform);
    for (std::size_t j = 0; j < r.t.size(); ++j) {
        EXPECT_NEAR(r.pi_a[j], f.pi_a[j], 1e-9);
        EXPECT_NEAR(r.pi_c[j], f.pi_c[j], 1e-9);
    }
}

TEST(Renewal, EnsembleIsNormalizedAndTrapsInC) {
    const auto& s = trapping_solution();
    const auto r = renewal::solve_renewal(s, 1.0);
    for (std::size_t j = 0; j < r.t.size(); ++j) {
        EXPECT_NEAR(r.pi_a[j] + r.pi_b[j] + r.pi_c[j], 1.0, 1e-4);
        EXPECT_GE(r.pi_c[j], -1e-6);  // inversion accuracy
    }
    // Every emission restarts the cycle, so c accumulates far beyond P(inf).
    EXPECT_GT(r.pi_c.back(), 0.9);
}

TEST(Renewal, NoDampingMeansNoJumps) {
    SystemParams p;
    p.gamma = 0.0;
    p.laser_coupling = 1.0;
    inversion::ContourSpec spec;
    spec.offset = 0.05;
    const auto s = inversion::nojump_populations(p, resolvent::band_edge_of(p), spec, 5.0, 0.01);
    const auto r = renewal::solve_renewal(s, 0.0);
    for (std::size_t j = 0; j < s.size(); ++j) EXPECT_DOUBLE_EQ(r.pi_a[j], s.pi_a[j]);
}

TEST(Renewal, RejectsBadInput) {
    inversion::NoJumpSolution empty;
    EXPECT_THROW(renewal::solve_renewal(empty, 1.0), DomainError);
    EXPECT_THROW(renewal::solve_renewal(trapping_solution(), -1.0), DomainError);
}
