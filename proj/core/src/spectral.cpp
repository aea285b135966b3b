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

#include "pbgfluor/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pbgfluor/errors.hpp"

namespace pbgfluor::spectral {

namespace {

using std::numbers::pi;

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(std::string("band model: ") + what);
}

}  // namespace

BandModel::BandModel(double scatterer_radius, double refractive_index, double light_speed)
    : radius_(scatterer_radius), index_(refractive_index), light_speed_(light_speed) {
    require(std::isfinite(radius_) && radius_ > 0.0, "scatterer radius must be finite and > 0");
    require(std::isfinite(index_) && index_ >= 1.0, "refractive index must be finite and >= 1");
    require(std::isfinite(light_speed_) && light_speed_ > 0.0, "light speed must be finite and > 0");
}

double BandModel::gap_center() const { return pi * light_speed_ / (4.0 * index_ * radius_); }

double BandModel::edge_wavenumber() const { return pi / (2.0 * radius_ * (index_ + 1.0)); }

double BandModel::dispersion_argument(double k) const {
    const double n = index_;
    return (4.0 * n * std::cos(2.0 * k * radius_ * (1.0 + n)) + (1.0 - n) * (1.0 - n)) /
           ((1.0 + n) * (1.0 + n));
}

double BandModel::gap_width() const {
    // The arccos argument is smallest at k0 where cos(...) = -1.
    const double n = index_;
    const double arg_min = (1.0 - 6.0 * n + n * n) / ((1.0 + n) * (1.0 + n));
    const double scale = light_speed_ / (4.0 * n * radius_);
    return 2.0 * scale * (pi - std::acos(arg_min));
}

double BandModel::upper_edge() const { return gap_center() + 0.5 * gap_width(); }

double dispersion_omega(double k, const BandModel& model, Branch branch) {
    if (!std::isfinite(k) || k <= 0.0) throw DomainError("dispersion_omega: k must be finite and > 0");
    const double scale = model.light_speed() / (4.0 * model.refractive_index() * model.scatterer_radius());
    // Rounding can push the argument a hair outside [-1, 1] for n close to 1.
    const double arg = std::clamp(model.dispersion_argument(k), -1.0, 1.0);
    const double lower = std::acos(arg);
    return branch == Branch::lower ? scale * lower : scale * (2.0 * pi - lower);
}

BandEdgeParams band_edge_params(const BandModel& model) {
    require(model.refractive_index() > 1.0, "effective-mass expansion needs n > 1");
    const double a = model.scatterer_radius();
    const double c = model.light_speed();
    const double omega_e = model.upper_edge();
    const double s = std::sin(4.0 * model.refractive_index() * a * omega_e / c);
    if (s == 0.0 || !std::isfinite(s)) throw DomainError("band_edge_params: degenerate curvature");
    const double curvature = -2.0 * a * c / s;
    if (!(curvature > 0.0)) throw DomainError("band_edge_params: upper edge must curve upward");
    return {omega_e, curvature, model.edge_wavenumber()};
}

double effective_coupling(const CouplingModel& coupling, const BandModel& band) {
    if (!(coupling.dipole_moment >= 0.0) || !(coupling.vacuum_permittivity > 0.0))
        throw DomainError("effective_coupling: dipole moment must be >= 0 and permittivity > 0");
    const auto edge = band_edge_params(band);
    if (!(edge.curvature > 0.0)) throw DomainError("effective_coupling: curvature must be positive");
    const double d2 = coupling.dipole_moment * coupling.dipole_moment;
    return d2 * edge.k0 * edge.k0 * edge.omega_e /
           (4.0 * pi * coupling.vacuum_permittivity * std::sqrt(edge.curvature));
}

double coupling_from_pow23(double c_pow23) {
    if (!std::isfinite(c_pow23) || c_pow23 < 0.0) throw DomainError("coupling_from_pow23: target must be >= 0");
    return std::pow(c_pow23, 1.5);
}

}  // namespace pbgfluor::spectral
