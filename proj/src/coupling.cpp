// SPDX-License-Identifier: Apache-2.0

#include "holosurf/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace holosurf {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * std::numbers::pi;

// Displacements are quantized to 1e-12 wavelengths when used as cache keys.
long long quantize(double v) { return std::llround(v * 1e12); }

struct DispKey {
    long long x, y, z;
    bool operator==(const DispKey&) const = default;
};

struct DispKeyHash {
    std::size_t operator()(const DispKey& k) const {
        std::size_t h = std::hash<long long>{}(k.x);
        h = h * 0x9e3779b97f4a7c15ull + std::hash<long long>{}(k.y);
        h = h * 0x9e3779b97f4a7c15ull + std::hash<long long>{}(k.z);
        return h;
    }
};

// Per-node weight * R(u) cached once so repeated entries only pay for the
// phase factors.
struct EntryEvaluator {
    const SphericalQuadrature& quad;
    std::vector<double> rw;

    EntryEvaluator(const RadiationPattern& pattern, const SphericalQuadrature& q) : quad(q) {
        rw.resize(quad.nodes.size());
        for (std::size_t i = 0; i < quad.nodes.size(); ++i)
            rw[i] = quad.nodes[i].weight * pattern.value(quad.nodes[i].u);
    }

    std::complex<double> operator()(const Vec3& disp) const {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = 0; i < quad.nodes.size(); ++i)
            acc += rw[i] * std::polar(1.0, -two_pi * dot(quad.nodes[i].u, disp));
        return acc / (4.0 * pi);
    }
};

// Factorization for displacements confined to the x = 0 plane. With
// u = (s cos(phi), s sin(phi), mu), s = sqrt(1 - mu^2), an entry splits as
//   c(dy, dz) = (1/4pi) sum_p w_p e^{-j 2 pi mu_p dz} T_p(dy),
//   T_p(dy)   = sum_q w_phi R_pq e^{-j 2 pi s_p sin(phi_q) dy},
// so a set of displacements sharing few distinct dy values costs
// O(#dy * P * Q) instead of O(#displacements * P * Q).
struct PlanarFactorizer {
    const SphericalQuadrature& quad;
    std::vector<double> rw;       // phi_weight * R at node (p, q), p-major
    std::vector<double> sin_phi;  // per azimuth node
    std::vector<double> s;        // sin(theta_p) per polar node

    PlanarFactorizer(const RadiationPattern& pattern, const SphericalQuadrature& q) : quad(q) {
        const int np = quad.n_polar();
        const int na = quad.n_azimuth();
        rw.resize(static_cast<std::size_t>(np) * na);
        sin_phi.resize(na);
        s.resize(np);
        for (int k = 0; k < na; ++k) sin_phi[k] = std::sin(quad.phi[k]);
        for (int p = 0; p < np; ++p) {
            s[p] = std::sqrt(std::max(0.0, 1.0 - quad.mu[p] * quad.mu[p]));
            for (int k = 0; k < na; ++k) {
                const UnitVec u{s[p] * std::cos(quad.phi[k]), s[p] * sin_phi[k], quad.mu[p]};
                rw[static_cast<std::size_t>(p) * na + k] = quad.phi_weight * pattern.value(u);
            }
        }
    }

    void t_column(double dy, std::complex<double>* out) const {
        const int np = quad.n_polar();
        const int na = quad.n_azimuth();
        for (int p = 0; p < np; ++p) {
            std::complex<double> acc{0.0, 0.0};
            const double* rwp = &rw[static_cast<std::size_t>(p) * na];
            const double w = -two_pi * s[p] * dy;
            for (int k = 0; k < na; ++k) acc += rwp[k] * std::polar(1.0, w * sin_phi[k]);
            out[p] = acc;
        }
    }

    std::complex<double> combine(const std::complex<double>* t_col, double dz) const {
        const int np = quad.n_polar();
        std::complex<double> acc{0.0, 0.0};
        for (int p = 0; p < np; ++p)
            acc += quad.mu_weight[p] * t_col[p] * std::polar(1.0, -two_pi * quad.mu[p] * dz);
        return acc / (4.0 * pi);
    }
};

bool is_uniform_progression(const std::vector<long long>& sorted_vals) {
    if (sorted_vals.size() < 3) return true;
    const long long step = sorted_vals[1] - sorted_vals[0];
    for (std::size_t i = 2; i < sorted_vals.size(); ++i)
        if (sorted_vals[i] - sorted_vals[i - 1] != step) return false;
    return true;
}

std::vector<long long> sorted_unique(std::vector<long long> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Grid assembly: every signed (dy, dz) displacement of a uniform planar grid
// indexes a dense (2 ny - 1) x (2 nz - 1) table, so the n x n matrix costs
// O(ny * P * Q) quadrature work and O(n^2) table lookups.
void assemble_planar_grid(arma::cx_mat& out, const std::vector<long long>& uy,
                          const std::vector<long long>& uz, const std::vector<std::size_t>& iy,
                          const std::vector<std::size_t>& iz, const RadiationPattern& pattern,
                          const SphericalQuadrature& quad) {
    const PlanarFactorizer fac(pattern, quad);
    const int np = quad.n_polar();
    const std::size_t ny = uy.size();
    const std::size_t nz = uz.size();
    const std::size_t ndy = 2 * ny - 1;
    const std::size_t ndz = 2 * nz - 1;
    const double ystep = ny > 1 ? static_cast<double>(uy[1] - uy[0]) * 1e-12 : 0.0;
    const double zstep = nz > 1 ? static_cast<double>(uz[1] - uz[0]) * 1e-12 : 0.0;

    arma::cx_mat t(np, ndy);
    std::vector<std::complex<double>> col(np);
    for (std::size_t k = 0; k < ndy; ++k) {
        const double dy = (static_cast<double>(k) - static_cast<double>(ny - 1)) * ystep;
        fac.t_column(dy, col.data());
        for (int p = 0; p < np; ++p) t(p, k) = col[p];
    }

    arma::cx_mat e(np, ndz);
    for (std::size_t m = 0; m < ndz; ++m) {
        const double dz = (static_cast<double>(m) - static_cast<double>(nz - 1)) * zstep;
        for (int p = 0; p < np; ++p)
            e(p, m) = quad.mu_weight[p] * std::polar(1.0, -two_pi * quad.mu[p] * dz);
    }

    const arma::cx_mat ctab = (t.st() * e) / (4.0 * pi);

    const std::size_t n = out.n_rows;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            out(i, j) = ctab(iy[i] - iy[j] + (ny - 1), iz[i] - iz[j] + (nz - 1));
}

}  // namespace

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = pi * x;
    return std::sin(px) / px;
}

double isotropic_coupling(double distance) { return sinc(2.0 * distance); }

double isotropic_coupling(const Vec3& t_a, const Vec3& t_b) {
    return sinc(2.0 * norm(t_a - t_b));
}

std::complex<double> coupling_entry(const RadiationPattern& pattern, const Vec3& t_a,
                                    const Vec3& t_b, const SphericalQuadrature& quad) {
    return EntryEvaluator(pattern, quad)(t_a - t_b);
}

std::vector<std::complex<double>> coupling_entries(const RadiationPattern& pattern,
                                                   const std::vector<Vec3>& displacements,
                                                   const SphericalQuadrature& quad) {
    std::vector<std::complex<double>> out(displacements.size());
    const bool planar = std::all_of(displacements.begin(), displacements.end(),
                                    [](const Vec3& d) { return quantize(d.x) == 0; });
    if (planar) {
        const PlanarFactorizer fac(pattern, quad);
        const int np = quad.n_polar();
        std::unordered_map<long long, std::vector<std::complex<double>>> t_cols;
        for (const Vec3& d : displacements) {
            auto [it, fresh] = t_cols.try_emplace(quantize(d.y));
            if (fresh) {
                it->second.resize(np);
                fac.t_column(d.y, it->second.data());
            }
        }
        for (std::size_t i = 0; i < displacements.size(); ++i)
            out[i] = fac.combine(t_cols.at(quantize(displacements[i].y)).data(),
                                 displacements[i].z);
        return out;
    }
    const EntryEvaluator eval(pattern, quad);
    for (std::size_t i = 0; i < displacements.size(); ++i) out[i] = eval(displacements[i]);
    return out;
}

CouplingMatrix coupling_matrix(const ArrayGeometry& geom, const RadiationPattern& pattern,
                               const SphericalQuadrature& quad) {
    const std::size_t n = geom.size();
    if (n == 0) throw std::domain_error("coupling_matrix: empty geometry");

    CouplingMatrix cm;
    cm.pattern_kind = pattern.kind();
    cm.dipole_length = pattern.dipole_length();
    cm.entries.set_size(n, n);

    if (pattern.kind() == PatternKind::Isotropic) {
        cm.method = CouplingMethod::AnalyticSinc;
        for (std::size_t j = 0; j < n; ++j) {
            cm.entries(j, j) = 1.0;
            for (std::size_t i = j + 1; i < n; ++i) {
                const double c = isotropic_coupling(geom.positions[i], geom.positions[j]);
                cm.entries(i, j) = c;
                cm.entries(j, i) = c;
            }
        }
        return cm;
    }

    cm.method = CouplingMethod::Quadrature;
    std::vector<long long> qx(n), qy(n), qz(n);
    for (std::size_t i = 0; i < n; ++i) {
        qx[i] = quantize(geom.positions[i].x);
        qy[i] = quantize(geom.positions[i].y);
        qz[i] = quantize(geom.positions[i].z);
    }

    const bool planar = std::all_of(qx.begin(), qx.end(), [&](long long v) { return v == qx[0]; });
    if (planar) {
        const auto uy = sorted_unique(qy);
        const auto uz = sorted_unique(qz);
        if (is_uniform_progression(uy) && is_uniform_progression(uz)) {
            std::vector<std::size_t> iy(n), iz(n);
            for (std::size_t i = 0; i < n; ++i) {
                iy[i] = std::lower_bound(uy.begin(), uy.end(), qy[i]) - uy.begin();
                iz[i] = std::lower_bound(uz.begin(), uz.end(), qz[i]) - uz.begin();
            }
            assemble_planar_grid(cm.entries, uy, uz, iy, iz, pattern, quad);
            return cm;
        }
    }

    // Generic path: one quadrature evaluation per distinct displacement.
    EntryEvaluator eval(pattern, quad);
    std::unordered_map<DispKey, std::complex<double>, DispKeyHash> cache;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j; i < n; ++i) {
            const DispKey key{qx[i] - qx[j], qy[i] - qy[j], qz[i] - qz[j]};
            auto it = cache.find(key);
            if (it == cache.end()) {
                const Vec3 disp = geom.positions[i] - geom.positions[j];
                it = cache.emplace(key, eval(disp)).first;
            }
            cm.entries(i, j) = it->second;
            cm.entries(j, i) = std::conj(it->second);
        }
    return cm;
}

arma::cx_mat TransferMatrix::matrix() const {
    const arma::cx_vec d = arma::conv_to<arma::cx_vec>::from(inv_sqrt);
    return eigenvectors * arma::diagmat(d) * eigenvectors.t();
}

arma::cx_vec TransferMatrix::apply(const arma::cx_vec& f) const {
    arma::cx_vec b = eigenvectors.t() * f;
    b %= arma::conv_to<arma::cx_vec>::from(inv_sqrt);
    return eigenvectors * b;
}

arma::cx_rowvec TransferMatrix::apply_left(const arma::cx_rowvec& h) const {
    arma::cx_rowvec b = h * eigenvectors;
    b %= arma::conv_to<arma::cx_rowvec>::from(inv_sqrt.t());
    return b * eigenvectors.t();
}

TransferMatrix transfer_matrix(const CouplingMatrix& coupling, double threshold) {
    const arma::cx_mat& c = coupling.entries;
    if (c.n_rows == 0 || c.n_rows != c.n_cols)
        throw std::invalid_argument("transfer_matrix: coupling matrix must be square and non-empty");
    if (!(threshold >= 0.0))
        throw std::invalid_argument("transfer_matrix: retention threshold must be >= 0");

    double herm_err = 0.0;
    for (arma::uword j = 0; j < c.n_cols; ++j)
        for (arma::uword i = j; i < c.n_rows; ++i)
            herm_err = std::max(herm_err, std::abs(c(i, j) - std::conj(c(j, i))));
    if (herm_err > 1e-10)
        throw std::runtime_error("transfer_matrix: coupling matrix is not Hermitian (max asymmetry " +
                                 std::to_string(herm_err) + ")");

    TransferMatrix t;
    t.threshold = threshold;
    if (!arma::eig_sym(t.eigenvalues, t.eigenvectors, c, "dc"))
        throw std::runtime_error("transfer_matrix: eigendecomposition failed to converge");

    // LAPACK returns ascending order; flip to descending in place.
    t.eigenvalues = arma::reverse(t.eigenvalues);
    for (arma::uword i = 0, j = t.eigenvectors.n_cols - 1; i < j; ++i, --j)
        t.eigenvectors.swap_cols(i, j);

    if (t.eigenvalues.min() < -1e-10)
        throw std::runtime_error("transfer_matrix: coupling matrix eigenvalue " +
                                 std::to_string(t.eigenvalues.min()) + " below PSD tolerance");
    t.eigenvalues.transform([](double v) { return v < 0.0 ? 0.0 : v; });

    t.inv_sqrt.set_size(t.eigenvalues.n_elem);
    std::size_t kept = 0;
    for (arma::uword i = 0; i < t.eigenvalues.n_elem; ++i) {
        const double lam = t.eigenvalues(i);
        if (lam >= threshold && lam > 0.0) {
            t.inv_sqrt(i) = 1.0 / std::sqrt(lam);
            ++kept;
        } else {
            t.inv_sqrt(i) = 0.0;
        }
    }
    t.retained_count = kept;
    return t;
}

double min_uncoupling_distance(const RadiationPattern& pattern, Axis axis,
                               const SphericalQuadrature& quad) {
    const EntryEvaluator entry(pattern, quad);
    auto eval = [&](double d) {
        const Vec3 disp = axis == Axis::Y ? Vec3{0.0, d, 0.0} : Vec3{0.0, 0.0, d};
        const std::complex<double> c = entry(disp);
        if (std::abs(c.imag()) > 1e-6)
            throw std::runtime_error("min_uncoupling_distance: coupling is not real along this axis");
        return c.real();
    };

    constexpr double step = 0.01;
    constexpr double d_max = 2.0;
    double prev_d = 0.0;
    double prev_c = 1.0;  // zero separation couples fully
    for (int k = 1; k * step <= d_max + 1e-12; ++k) {
        const double d = k * step;
        const double c = eval(d);
        if (c == 0.0) return d;
        if (prev_c > 0.0 && c < 0.0) {
            double lo = prev_d, hi = d;
            while (hi - lo > 1e-9) {
                const double mid = 0.5 * (lo + hi);
                if (eval(mid) > 0.0) lo = mid;
                else hi = mid;
            }
            return 0.5 * (lo + hi);
        }
        prev_d = d;
        prev_c = c;
    }
    throw std::runtime_error("min_uncoupling_distance: no zero crossing within 2 wavelengths");
}

}  // namespace holosurf
