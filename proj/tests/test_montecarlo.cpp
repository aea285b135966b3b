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

#include <algorithm>
#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "pbgfluor/errors.hpp"
#include "pbgfluor/inversion.hpp"
#include "pbgfluor/montecarlo.hpp"
#include "pbgfluor/parallel.hpp"
#include "pbgfluor/rng.hpp"

using namespace pbgfluor;
using namespace pbgfluor::montecarlo;

namespace {

const inversion::NoJumpSolution& trapping_solution() {
    static const auto s = [] {
        SystemParams p;
        p.pbg_coupling = std::pow(1.0 / 3.0, 1.5);
        return inversion::nojump_populations(p, resolvent::band_edge_of(p), {}, 30.0, 0.01);
    }();
    return s;
}

double norm_at(const inversion::NoJumpSolution& s, double t) {
    const auto hi = static_cast<std::size_t>(std::upper_bound(s.t.begin(), s.t.end(), t) - s.t.begin());
    if (hi >= s.size()) return s.norm.back();
    const std::size_t lo = hi - 1;
    const double w = (t - s.t[lo]) / (s.t[hi] - s.t[lo]);
    return (1.0 - w) * s.norm[lo] + w * s.norm[hi];
}

}  // namespace

TEST(Rng, SeedsAreDistinctAndStable) {
    EXPECT_NE(trajectory_seed(1, 0), trajectory_seed(1, 1));
    EXPECT_NE(trajectory_seed(1, 0), trajectory_seed(2, 0));
    EXPECT_EQ(trajectory_seed(7, 3), trajectory_seed(7, 3));
    UniformStream a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        const double x = a();
        EXPECT_GT(x, 0.0);
        EXPECT_LT(x, 1.0);
        EXPECT_EQ(x, b());
    }
}

TEST(DelaySampler, InvertsTheNorm) {
    const auto& s = trapping_solution();
    const DelaySampler sampler(s);
    EXPECT_DOUBLE_EQ(sampler.p_inf(), s.norm.back());
    for (double eps : {0.95, 0.7, 0.5, 0.3, 0.21}) {
        const auto delay = sampler(eps);
        ASSERT_TRUE(delay.has_value());
        EXPECT_NEAR(norm_at(s, *delay), eps, 2e-4) << eps;
    }
    EXPECT_FALSE(sampler(0.5 * s.norm.back()).has_value());
    EXPECT_FALSE(sampler(s.norm.back()).has_value());
    EXPECT_EQ(sampler(1.0).value(), 0.0);
}

TEST(DelaySampler, KolmogorovSmirnovAgainstWaitingTimeLaw) {
    const auto& s = trapping_solution();
    const DelaySampler sampler(s);
    UniformStream uniform(2024);
    std::vector<double> delays;
    while (delays.size() < 20000) {
        if (const auto d = sampler(uniform())) delays.push_back(*d);
    }
    std::sort(delays.begin(), delays.end());
    // Conditional on emission, the delay CDF is (1 - P(t)) / (1 - P(T)).
    const double total = 1.0 - s.norm.back();
    double d_max = 0.0;
    const double n = static_cast<double>(delays.size());
    for (std::size_t i = 0; i < delays.size(); ++i) {
        const double cdf = (1.0 - norm_at(s, delays[i])) / total;
        d_max = std::max({d_max, std::abs(cdf - i / n), std::abs(cdf - (i + 1) / n)});
    }
    EXPECT_GT(oracles::kolmogorov_pvalue(d_max, delays.size()), 0.01) << "D = " << d_max;
}

TEST(Trajectory, DeterministicPerSeed) {
    const DelaySampler sampler(trapping_solution());
    const auto a = run_trajectory(sampler, 30.0, 99);
    const auto b = run_trajectory(sampler, 30.0, 99);
    EXPECT_EQ(a.jump_times, b.jump_times);
    EXPECT_TRUE(std::is_sorted(a.jump_times.begin(), a.jump_times.end()));
    for (double t : a.jump_times) EXPECT_LE(t, 30.0);
}

TEST(Trajectory, UnboundedHorizonEndsTrapped) {
    const DelaySampler sampler(trapping_solution());
    for (std::uint64_t seed = 1; seed < 50; ++seed) {
        const auto r = run_trajectory(sampler, std::numeric_limits<double>::infinity(), seed);
        EXPECT_EQ(r.terminated_by, Termination::trapped);
        EXPECT_EQ(r.photon_count, r.jump_times.size());
    }
}

TEST(Ensemble, IndependentOfThreadCount) {
    const auto& s = trapping_solution();
    const std::size_t saved = worker_threads();
    worker_threads() = 1;
    const auto one = ensemble_average(500, 11, s, 30.0);
    worker_threads() = 4;
    const auto four = ensemble_average(500, 11, s, 30.0);
    worker_threads() = saved;
    EXPECT_EQ(one.mean_a, four.mean_a);
    EXPECT_EQ(one.stderr_c, four.stderr_c);
    EXPECT_EQ(one.photon_histogram, four.photon_histogram);
}

TEST(Ensemble, StandardErrorMatchesSpreadOfIndependentRuns) {
    // Central-limit check: the scatter of means from independent seeds
    // should match the reported standard error.
    const auto& s = trapping_solution();
    const std::size_t probe = 500;  // t = 5
    std::vector<double> means;
    double reported = 0.0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto stats = ensemble_average(250, seed * 1000, s, 10.0);
        means.push_back(stats.mean_c[probe]);
        reported += stats.stderr_c[probe] / 40.0;
    }
    double mean = 0.0, var = 0.0;
    for (double m : means) mean += m / means.size();
    for (double m : means) var += (m - mean) * (m - mean) / (means.size() - 1);
    EXPECT_NEAR(std::sqrt(var) / reported, 1.0, 0.3);
}

TEST(Photons, GeometricLaw) {
    const auto& s = trapping_solution();
    const DelaySampler sampler(s);
    const auto records = run_ensemble(5000, 3, sampler, std::numeric_limits<double>::infinity());
    const auto stats = photon_statistics(records, sampler.p_inf(), 16);
    EXPECT_NEAR(stats.expected_mean, 1.0 / sampler.p_inf() - 1.0, 1e-15);
    EXPECT_LT(std::abs(stats.mean - stats.expected_mean), 4.0 * stats.mean_stderr);
    EXPECT_GT(stats.p_value, 1e-3);
    EXPECT_EQ(stats.non_terminated_fraction, 0.0);
    double mass = 0.0;
    for (double g : stats.geometric) mass += g;
    EXPECT_NEAR(mass, 1.0, 1e-12);
}

TEST(Photons, RejectsBadInput) {
    std::vector<TrajectoryRecord> none;
    EXPECT_THROW(photon_statistics(none, 0.2), DomainError);
    std::vector<TrajectoryRecord> one(1);
    EXPECT_THROW(photon_statistics(one, 1.5), DomainError);
    EXPECT_THROW(ensemble_average(0, 1, trapping_solution(), 10.0), DomainError);
}
