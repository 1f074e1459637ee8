#pragma once

#include <Eigen/Dense>

#include "amrpe/spg.hpp"

namespace amrpe {

/// Dense 0/1 adjacency of the SPG.
Eigen::MatrixXi adjacency_matrix(const Spg& spg);

/// Hermitian operator D_S - A_S .* exp(i*Theta) where A_S is the symmetrized
/// adjacency, D_S its degree diagonal, and Theta[u][v] = 2*pi*q*(A[u][v] -
/// A[v][u]) encodes edge direction as a phase. Hermitian exactly by
/// construction; positive semidefinite.
struct MagneticLaplacian {
    Eigen::MatrixXcd entries;
    double q = 0.0;

    int n() const { return static_cast<int>(entries.rows()); }
};

MagneticLaplacian magnetic_laplacian(const Spg& spg, double q);

/// Eigenpairs of a magnetic Laplacian. Eigenvalues ascending; eigenvector
/// columns orthonormal and gauge-fixed (each column rotated so its
/// largest-magnitude entry is real non-negative, ties broken by lowest row
/// index). Columns inside a degenerate cluster (gap < 1e-10) are ordered by
/// the lexicographic order of their entries rounded to 1e-6.
struct Spectrum {
    Eigen::VectorXd eigenvalues;   // k_eff entries
    Eigen::MatrixXcd eigenvectors; // n x k_eff
    double q = 0.0;
    int k = 0; // requested count; k_eff = min(k, n)

    int n() const { return static_cast<int>(eigenvectors.rows()); }
    int k_eff() const { return static_cast<int>(eigenvectors.cols()); }
};

/// Full decomposition (k_eff = n). Throws convergence_failure if the solver
/// does not converge.
Spectrum hermitian_eigen(const MagneticLaplacian& lap);

/// Spectrum truncated to the min(k, n) lowest eigenpairs.
Spectrum hermitian_eigen_lowest(const MagneticLaplacian& lap, int k);

/// Real node-level encodings: row i = [Re(row i of the k lowest
/// eigenvectors) || Im(...)], zero-padded to width 2k when n < k.
Eigen::MatrixXd node_pes(const Spectrum& spec, int k);

/// I - D_S^{-1/2} A_S D_S^{-1/2}; rows/columns of isolated nodes are zero
/// (so a single-node graph yields [[0]]).
Eigen::MatrixXd symmetrized_normalized_laplacian(const Spg& spg);

} // namespace amrpe
