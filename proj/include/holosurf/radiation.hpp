// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <type_traits>
#include <vector>

#include "holosurf/geometry.hpp"

namespace holosurf {

// Product quadrature on the unit sphere: Gauss-Legendre in cos(theta) crossed
// with a uniform (periodic trapezoid) rule in phi. Weights sum to 4*pi.
struct SphericalQuadrature {
    struct Node {
        UnitVec u;
        double weight;
    };

    std::vector<double> mu;         // Gauss-Legendre nodes in [-1, 1], ascending
    std::vector<double> mu_weight;
    std::vector<double> phi;        // midpoints of a uniform grid over [-pi, pi)
    double phi_weight = 0.0;        // 2*pi / n_azimuth
    std::vector<Node> nodes;        // flattened, polar-major

    int n_polar() const { return static_cast<int>(mu.size()); }
    int n_azimuth() const { return static_cast<int>(phi.size()); }

    static SphericalQuadrature build(int n_polar, int n_azimuth);
};

// Shared 256 x 512 rule; accurate to ~1e-9 for the patterns used here.
const SphericalQuadrature& default_quadrature();

template <typename F>
auto spherical_integral(F&& f, const SphericalQuadrature& quad = default_quadrature()) {
    using R = std::invoke_result_t<F&, const UnitVec&>;
    R acc{};
    for (const auto& node : quad.nodes) acc += node.weight * f(node.u);
    return acc;
}

enum class PatternKind { Isotropic, Directional, Dipole };

// Power radiation pattern of a single element, normalized so that its mean
// over the sphere is 1 (lossless element). value() returns linear power gain.
class RadiationPattern {
  public:
    PatternKind kind() const { return kind_; }
    double normalization() const { return k_norm_; }
    double dipole_length() const { return dipole_len_; }  // wavelengths; 0 unless Dipole
    bool azimuth_invariant() const { return kind_ != PatternKind::Directional; }

    double value(const UnitVec& u) const;
    double value(double theta, double phi) const;
    double raw_value(const UnitVec& u) const;  // un-normalized shape

    static RadiationPattern isotropic();
    // Sectorized pattern with 65 deg half-power widths in both planes, 30 dB
    // floor, boresight on the +x axis.
    static RadiationPattern directional(const SphericalQuadrature& quad = default_quadrature());
    // Center-fed thin wire of the given length (wavelengths) along z.
    static RadiationPattern dipole(double length, const SphericalQuadrature& quad = default_quadrature());

  private:
    RadiationPattern(PatternKind kind, double k_norm, double dipole_len)
        : kind_(kind), k_norm_(k_norm), dipole_len_(dipole_len) {}

    PatternKind kind_;
    double k_norm_;     // cached at construction: 1 / (sphere mean of raw_value)
    double dipole_len_;
};

}  // namespace holosurf
