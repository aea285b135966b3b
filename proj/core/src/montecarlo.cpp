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

#include "pbgfluor/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "pbgfluor/errors.hpp"
#include "pbgfluor/parallel.hpp"
#include "pbgfluor/rng.hpp"

namespace pbgfluor::montecarlo {

namespace {

constexpr std::size_t kTrajectoriesPerBlock = 64;
constexpr std::size_t kMaxJumps = 100'000'000;

// Linear interpolation of y on the uniform grid t at time tau >= 0.
double interpolate(const std::vector<double>& y, double dt, double tau) {
    const double pos = tau / dt;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= y.size()) return y.back();
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * y[i] + w * y[i + 1];
}

}  // namespace

DelaySampler::DelaySampler(const inversion::NoJumpSolution& nojump, double tolerance) {
    const auto& norm = nojump.norm;
    if (norm.empty() || norm.size() != nojump.t.size()) throw DomainError("delay sampler: empty no-jump solution");
    // Clamp rounding-level increases; anything larger is an input error.
    std::vector<double> mono(norm.size());
    mono[0] = std::min(1.0, norm[0]);
    for (std::size_t j = 1; j < norm.size(); ++j) {
        if (norm[j] > mono[j - 1] + tolerance) {
            std::ostringstream msg;
            msg << "delay sampler: P(t) increases at t = " << nojump.t[j] << " by " << norm[j] - mono[j - 1];
            throw DomainError(msg.str());
        }
        mono[j] = std::min(mono[j - 1], norm[j]);
    }
    p_inf_ = std::max(0.0, mono.back());
    span_ = nojump.t.back();

    // Walk backwards so P ascends; on ties keep overwriting with the earlier time.
    for (std::size_t j = mono.size(); j-- > 0;) {
        if (!p_.empty() && mono[j] <= p_.back()) {
            t_.back() = nojump.t[j];
            continue;
        }
        p_.push_back(mono[j]);
        t_.push_back(nojump.t[j]);
    }
    if (p_.size() >= 4) {
        auto p = p_;
        auto t = t_;
        inverse_.emplace(std::move(p), std::move(t));
    }
}

std::optional<double> DelaySampler::operator()(double eps) const {
    if (eps <= p_inf_) return std::nullopt;
    if (eps >= p_.back()) return t_.back();
    double delay;
    if (inverse_) {
        delay = (*inverse_)(eps);
    } else {
        const auto hi = static_cast<std::size_t>(std::upper_bound(p_.begin(), p_.end(), eps) - p_.begin());
        const std::size_t lo = hi - 1;
        const double w = (eps - p_[lo]) / (p_[hi] - p_[lo]);
        delay = (1.0 - w) * t_[lo] + w * t_[hi];
    }
    return std::clamp(delay, 0.0, span_);
}

TrajectoryRecord run_trajectory(const DelaySampler& sampler, double horizon, std::uint64_t seed) {
    if (!(horizon >= 0.0)) throw DomainError("run_trajectory: horizon must be >= 0");
    TrajectoryRecord record;
    record.seed = seed;
    UniformStream uniform(seed);
    double t = 0.0;
    for (;;) {
        const auto delay = sampler(uniform());
        if (!delay) {
            record.terminated_by = Termination::trapped;
            break;
        }
        t += *delay;
        if (t > horizon) {
            record.terminated_by = Termination::horizon;
            break;
        }
        record.jump_times.push_back(t);
        if (record.jump_times.size() > kMaxJumps)
            throw NumericalError("run_trajectory: jump budget exhausted; P(t) may not decay on this grid");
    }
    record.photon_count = record.jump_times.size();
    return record;
}

PopulationSeries trajectory_populations(const TrajectoryRecord& record, const inversion::NoJumpSolution& nojump,
                                        std::span<const double> t_grid) {
    const double dt = nojump.dt();
    const std::size_t n = nojump.size();
    // Normalized no-jump populations; hold the last finite ratio where P underflows.
    std::vector<double> ra(n), rb(n), rc(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double p = nojump.norm[j];
        if (p > 1e-300) {
            ra[j] = nojump.pi_a[j] / p;
            rb[j] = nojump.pi_b[j] / p;
            rc[j] = 1.0 - ra[j] - rb[j];
        } else {
            ra[j] = j ? ra[j - 1] : 1.0;
            rb[j] = j ? rb[j - 1] : 0.0;
            rc[j] = j ? rc[j - 1] : 0.0;
        }
    }

    PopulationSeries series;
    series.pi_a.resize(t_grid.size());
    series.pi_b.resize(t_grid.size());
    series.pi_c.resize(t_grid.size());
    std::size_t next_jump = 0;
    double last_jump = 0.0;
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
        const double t = t_grid[j];
        while (next_jump < record.jump_times.size() && record.jump_times[next_jump] <= t)
            last_jump = record.jump_times[next_jump++];
        const double tau = t - last_jump;
        if (n < 2) {
            series.pi_a[j] = ra[0];
            series.pi_b[j] = rb[0];
            series.pi_c[j] = rc[0];
            continue;
        }
        series.pi_a[j] = interpolate(ra, dt, tau);
        series.pi_b[j] = interpolate(rb, dt, tau);
        series.pi_c[j] = 1.0 - series.pi_a[j] - series.pi_b[j];
    }
    return series;
}

std::vector<TrajectoryRecord> run_ensemble(std::size_t n_traj, std::uint64_t master_seed,
                                           const DelaySampler& sampler, double horizon) {
    std::vector<TrajectoryRecord> records(n_traj);
    parallel_for(n_traj, [&](std::size_t i) {
        records[i] = run_trajectory(sampler, horizon, trajectory_seed(master_seed, i));
    });
    return records;
}

EnsembleStats ensemble_average(std::size_t n_traj, std::uint64_t master_seed,
                               const inversion::NoJumpSolution& nojump, double horizon) {
    if (n_traj < 1) throw DomainError("ensemble_average: need at least one trajectory");
    if (!(horizon > 0.0)) throw DomainError("ensemble_average: horizon must be > 0");
    const DelaySampler sampler(nojump);

    EnsembleStats stats;
    stats.n_traj = n_traj;
    stats.master_seed = master_seed;
    for (std::size_t j = 0; j < nojump.size() && nojump.t[j] <= horizon * (1.0 + 1e-12); ++j)
        stats.t.push_back(nojump.t[j]);
    const std::size_t nt = stats.t.size();

    struct Block {
        std::vector<double> sum[3], sum_sq[3];
        std::vector<std::size_t> histogram;
        std::size_t photons = 0;
        std::size_t trapped = 0;
    };
    const std::size_t blocks = (n_traj + kTrajectoriesPerBlock - 1) / kTrajectoriesPerBlock;
    std::vector<Block> partial(blocks);
    parallel_for(blocks, [&](std::size_t b) {
        Block& block = partial[b];
        for (int c = 0; c < 3; ++c) {
            block.sum[c].assign(nt, 0.0);
            block.sum_sq[c].assign(nt, 0.0);
        }
        const std::size_t first = b * kTrajectoriesPerBlock;
        const std::size_t last = std::min(n_traj, first + kTrajectoriesPerBlock);
        for (std::size_t i = first; i < last; ++i) {
            const auto record = run_trajectory(sampler, horizon, trajectory_seed(master_seed, i));
            const auto series = trajectory_populations(record, nojump, stats.t);
            const std::vector<double>* values[3] = {&series.pi_a, &series.pi_b, &series.pi_c};
            for (int c = 0; c < 3; ++c) {
                for (std::size_t j = 0; j < nt; ++j) {
                    const double v = (*values[c])[j];
                    block.sum[c][j] += v;
                    block.sum_sq[c][j] += v * v;
                }
            }
            if (block.histogram.size() <= record.photon_count) block.histogram.resize(record.photon_count + 1, 0);
            ++block.histogram[record.photon_count];
            block.photons += record.photon_count;
            if (record.terminated_by == Termination::trapped) ++block.trapped;
        }
    });

    std::vector<double> sum[3], sum_sq[3];
    for (int c = 0; c < 3; ++c) {
        sum[c].assign(nt, 0.0);
        sum_sq[c].assign(nt, 0.0);
    }
    std::size_t photons = 0;
    for (const auto& block : partial) {
        for (int c = 0; c < 3; ++c) {
            for (std::size_t j = 0; j < nt; ++j) {
                sum[c][j] += block.sum[c][j];
                sum_sq[c][j] += block.sum_sq[c][j];
            }
        }
        if (stats.photon_histogram.size() < block.histogram.size())
            stats.photon_histogram.resize(block.histogram.size(), 0);
        for (std::size_t k = 0; k < block.histogram.size(); ++k) stats.photon_histogram[k] += block.histogram[k];
        photons += block.photons;
        stats.trapped += block.trapped;
    }

    const double n = static_cast<double>(n_traj);
    std::vector<double>* means[3] = {&stats.mean_a, &stats.mean_b, &stats.mean_c};
    std::vector<double>* errors[3] = {&stats.stderr_a, &stats.stderr_b, &stats.stderr_c};
    for (int c = 0; c < 3; ++c) {
        means[c]->resize(nt);
        errors[c]->resize(nt);
        for (std::size_t j = 0; j < nt; ++j) {
            const double mean = sum[c][j] / n;
            (*means[c])[j] = mean;
            const double var = n > 1 ? std::max(0.0, (sum_sq[c][j] - n * mean * mean) / (n - 1.0)) : 0.0;
            (*errors[c])[j] = std::sqrt(var / n);
        }
    }
    stats.mean_photons = static_cast<double>(photons) / n;
    return stats;
}

PhotonStatistics photon_statistics(std::span<const TrajectoryRecord> records, double p_inf, std::size_t max_bin) {
    if (records.empty()) throw DomainError("photon_statistics: no trajectories");
    if (!(p_inf >= 0.0 && p_inf <= 1.0)) throw DomainError("photon_statistics: P(inf) must lie in [0, 1]");
    if (max_bin < 1) throw DomainError("photon_statistics: max_bin must be >= 1");

    PhotonStatistics out;
    out.p_inf = p_inf;
    out.expected_mean = p_inf > 0.0 ? 1.0 / p_inf - 1.0 : std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(records.size());

    double sum = 0.0, sum_sq = 0.0;
    std::size_t open = 0;
    for (const auto& r : records) {
        if (out.histogram.size() <= r.photon_count) out.histogram.resize(r.photon_count + 1, 0);
        ++out.histogram[r.photon_count];
        const double k = static_cast<double>(r.photon_count);
        sum += k;
        sum_sq += k * k;
        if (r.terminated_by != Termination::trapped) ++open;
    }
    out.mean = sum / n;
    out.mean_stderr = records.size() > 1 ? std::sqrt(std::max(0.0, (sum_sq - n * out.mean * out.mean) / (n - 1.0)) / n) : 0.0;
    out.non_terminated_fraction = static_cast<double>(open) / n;

    // Bins k = 0..max_bin-1 and a pooled tail k >= max_bin.
    std::vector<double> observed(max_bin + 1, 0.0);
    for (std::size_t k = 0; k < out.histogram.size(); ++k)
        observed[std::min(k, max_bin)] += static_cast<double>(out.histogram[k]);
    out.geometric.resize(max_bin + 1);
    for (std::size_t k = 0; k < max_bin; ++k) out.geometric[k] = std::pow(1.0 - p_inf, static_cast<double>(k)) * p_inf;
    out.geometric[max_bin] = std::pow(1.0 - p_inf, static_cast<double>(max_bin));

    // Pool bins from the tail inward until every expected count is >= 5.
    std::vector<double> obs, expct;
    double carry_obs = 0.0, carry_exp = 0.0;
    for (std::size_t k = max_bin + 1; k-- > 0;) {
        carry_obs += observed[k];
        carry_exp += n * out.geometric[k];
        if (carry_exp >= 5.0) {
            obs.push_back(carry_obs);
            expct.push_back(carry_exp);
            carry_obs = carry_exp = 0.0;
        }
    }
    if (carry_exp > 0.0 || carry_obs > 0.0) {
        if (expct.empty()) {
            obs.push_back(carry_obs);
            expct.push_back(carry_exp);
        } else {
            obs.back() += carry_obs;
            expct.back() += carry_exp;
        }
    }

    if (expct.size() < 2) {
        out.degrees_of_freedom = 0;
        bool exact = true;
        for (std::size_t k = 0; k < observed.size(); ++k)
            if (std::abs(observed[k] - n * out.geometric[k]) > 1e-9 * n) exact = false;
        out.p_value = exact ? 1.0 : 0.0;
        out.warning = "too few populated bins for a chi-square test";
    } else {
        for (std::size_t i = 0; i < obs.size(); ++i) {
            if (expct[i] <= 0.0) continue;
            const double d = obs[i] - expct[i];
            out.chi_square += d * d / expct[i];
        }
        out.degrees_of_freedom = expct.size() - 1;
        const boost::math::chi_squared_distribution<double> dist(static_cast<double>(out.degrees_of_freedom));
        out.p_value = boost::math::cdf(boost::math::complement(dist, out.chi_square));
    }
    const double trapped = n * (1.0 - out.non_terminated_fraction);
    if (out.non_terminated_fraction > 0.01 || trapped < 100.0) {
        std::ostringstream msg;
        if (!out.warning.empty()) msg << out.warning << "; ";
        msg << "low statistical power: " << trapped << " trapped trajectories, non-terminated fraction "
            << out.non_terminated_fraction;
        out.warning = msg.str();
    }
    return out;
}

}  // namespace pbgfluor::montecarlo
