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
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <math.h>  // boost 1.74 pchip calls unqualified isnan

#include <boost/math/interpolators/pchip.hpp>

#include "pbgfluor/inversion.hpp"

namespace pbgfluor::montecarlo {

/// Inverse of the no-jump norm: draws waiting times until the next
/// flat-vacuum emission. Built on a monotone cubic (PCHIP) interpolant of
/// t(P); at flat stretches of P the earliest time wins.
class DelaySampler {
public:
    /// Throws DomainError if P increases anywhere by more than `tolerance`.
    explicit DelaySampler(const inversion::NoJumpSolution& nojump, double tolerance = 1e-9);

    /// Delay solving P(delay) = eps, or nullopt ("never") for eps <= P(T).
    /// eps >= 1 maps to delay 0.
    std::optional<double> operator()(double eps) const;

    double p_inf() const { return p_inf_; }
    double span() const { return span_; }

private:
    using Interpolant = boost::math::interpolators::pchip<std::vector<double>>;

    std::vector<double> p_;  // ascending norm values
    std::vector<double> t_;  // matching times (descending)
    std::optional<Interpolant> inverse_;
    double p_inf_;
    double span_;
};

enum class Termination { horizon, trapped };

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::vector<double> jump_times;
    std::size_t photon_count = 0;
    Termination terminated_by = Termination::horizon;
};

/// One trajectory: draw eps, advance by the sampled delay, jump back to |a>,
/// repeat until the horizon is passed or a draw falls below P(T).
TrajectoryRecord run_trajectory(const DelaySampler& sampler, double horizon, std::uint64_t seed);

/// Normalized populations pi0_i(tau) / P(tau), tau = time since the latest
/// jump, sampled on `t_grid`. Past the end of the no-jump grid the last
/// values are held.
struct PopulationSeries {
    std::vector<double> pi_a, pi_b, pi_c;
};
PopulationSeries trajectory_populations(const TrajectoryRecord& record, const inversion::NoJumpSolution& nojump,
                                        std::span<const double> t_grid);

struct EnsembleStats {
    std::vector<double> t;
    std::vector<double> mean_a, mean_b, mean_c;
    std::vector<double> stderr_a, stderr_b, stderr_c;
    std::vector<std::size_t> photon_histogram;  // index = photon count
    double mean_photons = 0.0;
    std::size_t n_traj = 0;
    std::uint64_t master_seed = 0;
    std::size_t trapped = 0;  // trajectories that ended with a "never" draw
};

/// Averages `n_traj` trajectories seeded by trajectory_seed(master_seed, i)
/// on the no-jump grid truncated to `horizon`. Bit-identical for a given
/// (n_traj, master_seed, nojump, horizon) regardless of thread count.
EnsembleStats ensemble_average(std::size_t n_traj, std::uint64_t master_seed,
                               const inversion::NoJumpSolution& nojump, double horizon);

/// Per-trajectory records only (no population series), e.g. for photon counting.
std::vector<TrajectoryRecord> run_ensemble(std::size_t n_traj, std::uint64_t master_seed,
                                           const DelaySampler& sampler, double horizon);

struct PhotonStatistics {
    std::vector<std::size_t> histogram;
    double mean = 0.0;
    double mean_stderr = 0.0;
    double p_inf = 0.0;
    double expected_mean = 0.0;  // 1 / P(inf) - 1
    double chi_square = 0.0;
    std::size_t degrees_of_freedom = 0;
    double p_value = 1.0;
    std::vector<double> geometric;  // (1 - P)^k P for k = 0..max_bin-1, tail mass last
    double non_terminated_fraction = 0.0;
    std::string warning;
};

/// Histogram of photon counts and a chi-square comparison with the geometric
/// law (1 - p_inf)^k p_inf over k = 0..max_bin - 1 plus a pooled tail bin.
PhotonStatistics photon_statistics(std::span<const TrajectoryRecord> records, double p_inf, std::size_t max_bin = 16);

}  // namespace pbgfluor::montecarlo
