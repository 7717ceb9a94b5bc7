// SPDX-License-Identifier: Apache-2.0

#include "holosurf/beamform.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace holosurf {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double null_depth_db = 30.0;  // minimum drop that qualifies a pattern null
}

SteeringVector steering_vector(const ArrayGeometry& geom, const RadiationPattern& pattern,
                               const Direction& target) {
    const UnitVec u = direction_to_unit(target);
    SteeringVector h;
    h.theta = target.theta;
    h.phi = target.phi;
    h.element_gain = pattern.value(u);
    const double amp = std::sqrt(h.element_gain);
    h.entries.set_size(geom.size());
    for (std::size_t i = 0; i < geom.size(); ++i)
        h.entries(i) = amp * std::polar(1.0, two_pi * dot(u, geom.positions[i]));
    return h;
}

BeamformingVector conventional_beamformer(const SteeringVector& h, double total_power) {
    if (!(total_power > 0.0))
        throw std::domain_error("conventional_beamformer: total power must be positive");
    const double n = arma::norm(h.entries, 2);
    if (n == 0.0)
        throw std::domain_error("conventional_beamformer: steering vector is zero (element pattern null)");
    BeamformingVector f;
    f.kind = BeamformerKind::Conventional;
    f.total_power = total_power;
    f.entries = (std::sqrt(total_power) / n) * h.entries.t();
    return f;
}

BeamformingVector optimal_beamformer(const SteeringVector& h, const TransferMatrix& a,
                                     double total_power) {
    if (!(total_power > 0.0))
        throw std::domain_error("optimal_beamformer: total power must be positive");
    if (h.entries.n_elem != a.eigenvectors.n_rows)
        throw std::invalid_argument("optimal_beamformer: steering/transfer size mismatch");
    arma::cx_vec af = a.apply(h.entries.t());
    const double n = arma::norm(af, 2);
    if (n == 0.0)
        throw std::domain_error("optimal_beamformer: steering vector lies outside the radiable subspace");
    BeamformingVector f;
    f.kind = BeamformerKind::Optimal;
    f.total_power = total_power;
    f.entries = (std::sqrt(total_power) / n) * af;
    return f;
}

GainResult gain(const SteeringVector& h, const TransferMatrix& a, const BeamformingVector& f) {
    if (h.entries.n_elem != f.entries.n_elem || h.entries.n_elem != a.eigenvectors.n_rows)
        throw std::invalid_argument("gain: dimension mismatch");
    const double fn = arma::norm(f.entries, 2);
    if (fn == 0.0) throw std::invalid_argument("gain: beamforming vector is zero");
    const std::complex<double> s = arma::as_scalar(a.apply_left(h.entries) * f.entries);
    GainResult g;
    g.linear = std::norm(s) / (fn * fn);
    g.db = 10.0 * std::log10(g.linear);
    g.theta = h.theta;
    g.phi = h.phi;
    g.kind = f.kind;
    return g;
}

double surface_pattern(const ArrayGeometry& geom, const RadiationPattern& pattern,
                       const TransferMatrix& a, const BeamformingVector& f,
                       const Direction& observe) {
    return gain(steering_vector(geom, pattern, observe), a, f).linear;
}

TwoElementGains two_element_closed_form(double spacing, double theta) {
    if (!(spacing > 0.0))
        throw std::domain_error("two_element_closed_form: spacing must be positive");
    const double psi = pi * spacing * std::cos(theta);
    const double s = sinc(2.0 * spacing);
    const double cp = std::cos(psi), sp = std::sin(psi);
    const double c2 = cp * cp, s2 = sp * sp;

    // The coupling matrix [[1, s], [s, 1]] has eigenpairs (1 +/- s) with the
    // sum/difference vectors, which gives every quantity in closed form.
    double inv_oms, inv_sqrt_oms;
    if (1.0 - s < 1e-8) {
        // 1 - sinc(2d) = (2 pi d)^2 / 6 + O(d^4); direct subtraction loses
        // all precision this close to zero spacing.
        const double w = two_pi * spacing;
        inv_oms = 6.0 / (w * w);
        inv_sqrt_oms = std::sqrt(inv_oms);
    } else {
        inv_oms = 1.0 / (1.0 - s);
        inv_sqrt_oms = 1.0 / std::sqrt(1.0 - s);
    }
    const double inv_sqrt_omp = 1.0 / std::sqrt(1.0 + s);

    TwoElementGains g;
    const double conv_amp = c2 * inv_sqrt_omp + s2 * inv_sqrt_oms;
    g.conventional = 2.0 * conv_amp * conv_amp;
    g.optimal = 2.0 * (c2 / (1.0 + s) + s2 * inv_oms);

    g.f_conventional.set_size(2);
    g.f_conventional(0) = std::polar(std::sqrt(0.5), -psi);
    g.f_conventional(1) = std::polar(std::sqrt(0.5), psi);

    // f_opt proportional to A h^H = (cp/sqrt(1+s) -+ j sp/sqrt(1-s)).
    arma::cx_vec af(2);
    af(0) = std::complex<double>(cp * inv_sqrt_omp, -sp * inv_sqrt_oms);
    af(1) = std::complex<double>(cp * inv_sqrt_omp, sp * inv_sqrt_oms);
    g.f_optimal = af / arma::norm(af, 2);
    return g;
}

BeamwidthResult zero_point_beamwidth(const PatternCut& cut, double target_deg) {
    const std::size_t n = cut.angle_deg.size();
    if (n != cut.level_db.size())
        throw std::invalid_argument("zero_point_beamwidth: angle/level size mismatch");
    if (n < 5) throw std::invalid_argument("zero_point_beamwidth: cut too short");
    const double step = cut.angle_deg[1] - cut.angle_deg[0];
    if (!(step > 0.0))
        throw std::invalid_argument("zero_point_beamwidth: angles must ascend");
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(cut.angle_deg[i] - cut.angle_deg[i - 1] - step) > 1e-9)
            throw std::invalid_argument("zero_point_beamwidth: angle grid must be uniform");

    const auto ln = static_cast<long>(n);
    auto wrap = [&](long i) { return ((i % ln) + ln) % ln; };
    auto level = [&](long i) { return cut.level_db[wrap(i)]; };

    // Nearest sample to the target, respecting wrap-around on periodic cuts.
    long p = 0;
    double best = std::numeric_limits<double>::infinity();
    const double span = step * static_cast<double>(n);
    for (long i = 0; i < ln; ++i) {
        double d = std::abs(cut.angle_deg[i] - target_deg);
        if (cut.periodic) d = std::min(d, span - d);
        if (d < best) {
            best = d;
            p = i;
        }
    }

    // Climb to the local peak; the target may fall between samples or a hair
    // off the true maximum.
    for (long guard = 0; guard < ln; ++guard) {
        const bool can_left = cut.periodic || p > 0;
        const bool can_right = cut.periodic || p < ln - 1;
        if (can_right && level(p + 1) > level(p)) p = p + 1;
        else if (can_left && level(p - 1) > level(p)) p = p - 1;
        else break;
    }
    p = wrap(p);

    BeamwidthResult r;
    r.peak_db = level(p);
    const double floor_db = r.peak_db - null_depth_db;

    auto scan = [&](int dir, bool& found, double& at_deg, long& offset) {
        const long limit = cut.periodic ? ln - 2 : (dir > 0 ? ln - 2 - p : p - 1);
        for (long k = 1; k <= limit; ++k) {
            const long i = p + dir * k;
            const double l = level(i);
            if (l <= level(i - 1) && l <= level(i + 1) && l <= floor_db) {
                found = true;
                at_deg = cut.angle_deg[wrap(i)];
                offset = k;
                return;
            }
        }
    };

    long k_left = 0, k_right = 0;
    scan(+1, r.right_found, r.right_deg, k_right);
    scan(-1, r.left_found, r.left_deg, k_left);
    r.complete = r.left_found && r.right_found;
    r.width_deg = r.complete ? step * static_cast<double>(k_left + k_right)
                             : std::numeric_limits<double>::quiet_NaN();
    return r;
}

}  // namespace holosurf
