// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <armadillo>
#include <complex>
#include <cstddef>

#include "holosurf/geometry.hpp"
#include "holosurf/radiation.hpp"

namespace holosurf {

// Normalized sinc: sin(pi x) / (pi x), 1 at x = 0.
double sinc(double x);

// Coupling between two isotropic elements: sinc(2 * separation), exactly real.
double isotropic_coupling(double distance);
double isotropic_coupling(const Vec3& t_a, const Vec3& t_b);

// c = (1/4pi) * integral over the sphere of R(u) * exp(-j 2 pi u . (t_a - t_b)).
std::complex<double> coupling_entry(const RadiationPattern& pattern, const Vec3& t_a,
                                    const Vec3& t_b,
                                    const SphericalQuadrature& quad = default_quadrature());

// Bulk variant: one entry per displacement, sharing pattern evaluations (and
// a tensor factorization when every displacement lies in the x = 0 plane).
std::vector<std::complex<double>> coupling_entries(
    const RadiationPattern& pattern, const std::vector<Vec3>& displacements,
    const SphericalQuadrature& quad = default_quadrature());

enum class CouplingMethod { AnalyticSinc, Quadrature };

// Hermitian PSD coupling matrix with unit diagonal; entry (i, j) couples
// element i to element j. Isotropic arrays use the closed form; other
// patterns share one quadrature rule across all entries, which keeps the
// matrix an exact Gram matrix (no spurious negative eigenvalues).
struct CouplingMatrix {
    arma::cx_mat entries;
    PatternKind pattern_kind = PatternKind::Isotropic;
    double dipole_length = 0.0;
    CouplingMethod method = CouplingMethod::AnalyticSinc;
};

CouplingMatrix coupling_matrix(const ArrayGeometry& geom, const RadiationPattern& pattern,
                               const SphericalQuadrature& quad = default_quadrature());

// Inverse square root of the coupling matrix, held in eigenbasis form.
// Eigenvalues below the retention threshold are dropped (their inverse root
// set to 0), which confines transmit power to the modes the surface can
// actually radiate.
struct TransferMatrix {
    arma::vec eigenvalues;      // descending, clamped at zero
    arma::cx_mat eigenvectors;  // columns paired with eigenvalues
    arma::vec inv_sqrt;         // lambda^(-1/2) where retained, else 0
    double threshold = 0.0;
    std::size_t retained_count = 0;

    arma::cx_mat matrix() const;                            // densifies V diag(inv_sqrt) V^H
    arma::cx_vec apply(const arma::cx_vec& f) const;        // A * f
    arma::cx_rowvec apply_left(const arma::cx_rowvec& h) const;  // h * A
};

TransferMatrix transfer_matrix(const CouplingMatrix& coupling, double threshold = 1e-12);

enum class Axis { Y, Z };

// Smallest element separation along the given axis at which the coupling
// vanishes: grid scan over (0, 2] wavelengths followed by bisection on the
// real part. Throws if the coupling never crosses zero or is not real on
// the scanned axis.
double min_uncoupling_distance(const RadiationPattern& pattern, Axis axis,
                               const SphericalQuadrature& quad = default_quadrature());

}  // namespace holosurf
