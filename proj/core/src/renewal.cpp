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

#include "pbgfluor/renewal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <sstream>

#include "pbgfluor/errors.hpp"

namespace pbgfluor::renewal {

namespace {

double uniform_step(const inversion::NoJumpSolution& s) {
    if (s.size() < 2) throw DomainError("renewal: need at least two time points");
    const double dt = s.t[1] - s.t[0];
    for (std::size_t j = 0; j < s.size(); ++j)
        if (std::abs(s.t[j] - s.t[0] - static_cast<double>(j) * dt) > 1e-9 * std::max(1.0, s.t.back()))
            throw DomainError("renewal: time grid must be uniform");
    if (s.pi_a.size() != s.size() || s.pi_b.size() != s.size() || s.pi_c.size() != s.size())
        throw DomainError("renewal: population arrays do not match the time grid");
    return dt;
}

// Trapezoid sum of x[k] f[n - k] over k = 0..n.
double trapezoid_convolution(const std::vector<double>& x, const std::vector<double>& f, std::size_t n) {
    if (n == 0) return 0.0;
    double sum = 0.5 * (x[0] * f[n] + x[n] * f[0]);
    for (std::size_t k = 1; k < n; ++k) sum += x[k] * f[n - k];
    return sum;
}

void check_populations(const EnsembleSolution& s, double tolerance) {
    for (std::size_t j = 0; j < s.t.size(); ++j) {
        for (double v : {s.pi_a[j], s.pi_b[j], s.pi_c[j]}) {
            if (v < -tolerance || v > 1.0 + tolerance) {
                std::ostringstream msg;
                msg << "renewal: population " << v << " outside [0, 1] at t = " << s.t[j]
                    << "; refine dt or the no-jump quadrature";
                throw NumericalError(msg.str());
            }
        }
    }
}

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwDeleter {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};

// In-place DFT of `data` (sign -1 forward, +1 backward, unnormalized).
void dft(std::vector<std::complex<double>>& data, int sign) {
    const int n = static_cast<int>(data.size());
    std::unique_ptr<fftw_complex, FftwDeleter> buffer(fftw_alloc_complex(data.size()));
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_1d(n, buffer.get(), buffer.get(), sign, FFTW_ESTIMATE);
    }
    std::copy(data.begin(), data.end(), reinterpret_cast<std::complex<double>*>(buffer.get()));
    fftw_execute(plan);
    std::copy_n(reinterpret_cast<std::complex<double>*>(buffer.get()), data.size(), data.begin());
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
}

}  // namespace

EnsembleSolution solve_renewal(const inversion::NoJumpSolution& nojump, double gamma, double tolerance) {
    if (!(gamma >= 0.0)) throw DomainError("renewal: gamma must be >= 0");
    const double dt = uniform_step(nojump);
    const std::size_t n = nojump.size();
    const double k = gamma * dt;

    EnsembleSolution s;
    s.t = nojump.t;
    s.method = Method::volterra;
    s.pi_b.resize(n);
    const auto& f = nojump.pi_b;
    // The unknown enters the n-th step only through the k = n end weight.
    const double implicit = 1.0 - 0.5 * k * f[0];
    for (std::size_t j = 0; j < n; ++j) {
        double sum = j == 0 ? 0.0 : 0.5 * s.pi_b[0] * f[j];
        for (std::size_t i = 1; i < j; ++i) sum += s.pi_b[i] * f[j - i];
        s.pi_b[j] = (f[j] + k * sum) / (j == 0 ? 1.0 : implicit);
    }
    s.pi_a.resize(n);
    s.pi_c.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        s.pi_a[j] = nojump.pi_a[j] + k * trapezoid_convolution(s.pi_b, nojump.pi_a, j);
        s.pi_c[j] = nojump.pi_c[j] + k * trapezoid_convolution(s.pi_b, nojump.pi_c, j);
    }
    check_populations(s, tolerance);
    return s;
}

EnsembleSolution renewal_transform_check(const inversion::NoJumpSolution& nojump, double gamma) {
    if (!(gamma >= 0.0)) throw DomainError("renewal: gamma must be >= 0");
    const double dt = uniform_step(nojump);
    const std::size_t n = nojump.size();
    const double k = gamma * dt;
    const std::size_t len = std::bit_ceil(4 * n);
    // Damping r^n = e^-8 keeps wrap-around below e^-24 and round-off growth below e^8.
    const double log_r = -8.0 / static_cast<double>(n);

    using complex = std::complex<double>;
    auto transform = [&](const std::vector<double>& f) {
        std::vector<complex> data(len, complex{0.0, 0.0});
        for (std::size_t j = 0; j < n; ++j) data[j] = f[j] * std::exp(log_r * static_cast<double>(j));
        dft(data, FFTW_FORWARD);
        return data;
    };
    auto restore = [&](std::vector<complex>& data, std::vector<double>& out) {
        dft(data, FFTW_BACKWARD);
        out.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            out[j] = data[j].real() / static_cast<double>(len) * std::exp(-log_r * static_cast<double>(j));
    };

    const double fb0 = nojump.pi_b[0];
    const auto fb = transform(nojump.pi_b);
    const auto fa = transform(nojump.pi_a);
    const auto fc = transform(nojump.pi_c);

    // Trapezoid discretization x = f + k (x * f - x0 f / 2 - f0 x / 2), x0 = f0.
    std::vector<complex> xb(len), xa(len), xc(len);
    for (std::size_t q = 0; q < len; ++q) {
        const complex denom = 1.0 + 0.5 * k * fb0 - k * fb[q];
        if (std::abs(denom) < 1e-12) {
            std::ostringstream msg;
            msg << "renewal transform: resummation pole at frequency index " << q;
            throw NumericalError(msg.str());
        }
        xb[q] = fb[q] * (1.0 - 0.5 * k * fb0) / denom;
    }
    for (std::size_t q = 0; q < len; ++q) {
        xa[q] = fa[q] + k * (xb[q] * fa[q] - 0.5 * fb0 * fa[q] - 0.5 * nojump.pi_a[0] * xb[q]);
        xc[q] = fc[q] + k * (xb[q] * fc[q] - 0.5 * fb0 * fc[q] - 0.5 * nojump.pi_c[0] * xb[q]);
    }

    EnsembleSolution s;
    s.t = nojump.t;
    s.method = Method::transform;
    restore(xb, s.pi_b);
    restore(xa, s.pi_a);
    restore(xc, s.pi_c);
    return s;
}

double renewal_residual(const EnsembleSolution& solution, const inversion::NoJumpSolution& nojump, double gamma) {
    const double dt = uniform_step(nojump);
    if (solution.pi_b.size() != nojump.size()) throw DomainError("renewal residual: size mismatch");
    double worst = 0.0;
    for (std::size_t j = 0; j < nojump.size(); ++j) {
        const double rhs = nojump.pi_b[j] + gamma * dt * trapezoid_convolution(solution.pi_b, nojump.pi_b, j);
        worst = std::max(worst, std::abs(solution.pi_b[j] - rhs));
    }
    return worst;
}

}  // namespace pbgfluor::renewal
