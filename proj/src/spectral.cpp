#include "amrpe/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <lapacke.h>

namespace amrpe {

Eigen::MatrixXi adjacency_matrix(const Spg& spg) {
    Eigen::MatrixXi a = Eigen::MatrixXi::Zero(spg.n, spg.n);
    for (auto [u, v] : spg.edges) a(u, v) = 1;
    return a;
}

MagneticLaplacian magnetic_laplacian(const Spg& spg, double q) {
    if (q < 0) fail(errc::invariant_violation, "q must be non-negative");
    if (spg.n < 1) fail(errc::invariant_violation, "graph must have at least one node");

    Eigen::MatrixXi a = adjacency_matrix(spg);
    MagneticLaplacian lap;
    lap.q = q;
    lap.entries = Eigen::MatrixXcd::Zero(spg.n, spg.n);

    for (int u = 0; u < spg.n; ++u) {
        double degree = 0;
        for (int v = u + 1; v < spg.n; ++v) {
            if (!a(u, v) && !a(v, u)) continue;
            double theta = 2.0 * std::numbers::pi * q * (a(u, v) - a(v, u));
            std::complex<double> phase = std::polar(1.0, theta);
            lap.entries(u, v) = -phase;
            lap.entries(v, u) = -std::conj(phase); // Hermitian exactly
        }
        for (int v = 0; v < spg.n; ++v)
            if (u != v && (a(u, v) || a(v, u))) degree += 1.0;
        lap.entries(u, u) = degree;
    }
    return lap;
}

namespace {

// Rotates a column so its largest-magnitude entry (ties: lowest index)
// becomes real and non-negative. Magnitudes within a relative 1e-12 of the
// maximum count as tied so that exact mathematical ties are not broken by
// solver round-off.
void gauge_fix_column(Eigen::Ref<Eigen::VectorXcd> col) {
    double max_mag = 0.0;
    for (Eigen::Index i = 0; i < col.size(); ++i) max_mag = std::max(max_mag, std::abs(col(i)));
    if (max_mag <= 0.0) return;
    Eigen::Index best = 0;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
        if (std::abs(col(i)) >= max_mag * (1.0 - 1e-12)) {
            best = i;
            break;
        }
    }
    std::complex<double> z = col(best);
    col *= std::conj(z) / std::abs(z);
    col(best) = std::complex<double>(std::abs(z), 0.0);
}

// Deterministic order inside a degenerate eigenvalue cluster: lexicographic
// on the gauge-fixed entries rounded to 1e-6.
std::vector<long long> rounding_key(const Eigen::VectorXcd& col) {
    std::vector<long long> key;
    key.reserve(2 * col.size());
    for (Eigen::Index i = 0; i < col.size(); ++i) {
        key.push_back(std::llround(col(i).real() * 1e6));
        key.push_back(std::llround(col(i).imag() * 1e6));
    }
    return key;
}

void canonicalize(Eigen::VectorXd& values, Eigen::MatrixXcd& vectors) {
    const Eigen::Index cols = vectors.cols();
    for (Eigen::Index c = 0; c < cols; ++c) gauge_fix_column(vectors.col(c));

    Eigen::Index start = 0;
    while (start < cols) {
        Eigen::Index end = start + 1;
        while (end < cols && values(end) - values(end - 1) < 1e-10) ++end;
        if (end - start > 1) {
            std::vector<Eigen::Index> order(end - start);
            std::vector<std::vector<long long>> keys(end - start);
            for (Eigen::Index i = 0; i < end - start; ++i) {
                order[i] = start + i;
                keys[i] = rounding_key(vectors.col(start + i));
            }
            std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
                return keys[a - start] < keys[b - start];
            });
            Eigen::MatrixXcd perm_vecs(vectors.rows(), end - start);
            Eigen::VectorXd perm_vals(end - start);
            for (Eigen::Index i = 0; i < end - start; ++i) {
                perm_vecs.col(i) = vectors.col(order[i]);
                perm_vals(i) = values(order[i]);
            }
            vectors.middleCols(start, end - start) = perm_vecs;
            values.segment(start, end - start) = perm_vals;
        }
        start = end;
    }
}

} // namespace

Spectrum hermitian_eigen(const MagneticLaplacian& lap) {
    const int n = lap.n();
    Eigen::MatrixXcd vectors = lap.entries; // column-major, overwritten in place
    Eigen::VectorXd values(n);
    int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                              reinterpret_cast<lapack_complex_double*>(vectors.data()), n,
                              values.data());
    if (info != 0)
        fail(errc::convergence_failure,
             "zheevd failed with info=" + std::to_string(info) + " (n=" + std::to_string(n) + ")");

    canonicalize(values, vectors);
    Spectrum spec;
    spec.eigenvalues = std::move(values);
    spec.eigenvectors = std::move(vectors);
    spec.q = lap.q;
    spec.k = n;
    return spec;
}

Spectrum hermitian_eigen_lowest(const MagneticLaplacian& lap, int k) {
    if (k < 1) fail(errc::invariant_violation, "k must be >= 1");
    Spectrum full = hermitian_eigen(lap);
    int k_eff = std::min(k, full.n());
    Spectrum spec;
    spec.eigenvalues = full.eigenvalues.head(k_eff);
    spec.eigenvectors = full.eigenvectors.leftCols(k_eff);
    spec.q = lap.q;
    spec.k = k;
    return spec;
}

Eigen::MatrixXd node_pes(const Spectrum& spec, int k) {
    if (k < 1) fail(errc::invariant_violation, "k must be >= 1");
    const int n = spec.n();
    const int k_eff = std::min(k, n);
    if (spec.k_eff() < k_eff)
        fail(errc::dimension_mismatch,
             "spectrum has " + std::to_string(spec.k_eff()) + " columns, need " +
                 std::to_string(k_eff));

    Eigen::MatrixXd pe = Eigen::MatrixXd::Zero(n, 2 * k);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k_eff; ++j) {
            pe(i, j) = spec.eigenvectors(i, j).real();
            pe(i, k + j) = spec.eigenvectors(i, j).imag();
        }
    }
    return pe;
}

Eigen::MatrixXd symmetrized_normalized_laplacian(const Spg& spg) {
    Eigen::MatrixXi a = adjacency_matrix(spg);
    const int n = spg.n;
    Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (u != v && (a(u, v) || a(v, u))) degree(u) += 1.0;

    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    for (int u = 0; u < n; ++u) {
        lap(u, u) = degree(u) > 0 ? 1.0 : 0.0; // isolated nodes get a zero row
        for (int v = u + 1; v < n; ++v) {
            if (!a(u, v) && !a(v, u)) continue;
            double w = -1.0 / std::sqrt(degree(u) * degree(v));
            lap(u, v) = w;
            lap(v, u) = w;
        }
    }
    return lap;
}

} // namespace amrpe
