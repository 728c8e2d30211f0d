// eigensolver.hpp: cyclic Jacobi diagonalization of real symmetric matrices.

#pragma once

#include <Eigen/Dense>

namespace qzsim {

/// Spectral decomposition H = V diag(eigenvalues) V^T.
///
/// Eigenvalues are ascending. Each eigenvector column has its
/// largest-magnitude component positive (first such index on ties), so the
/// decomposition is deterministic for non-degenerate spectra.
struct Eigensystem {
    Eigen::VectorXd eigenvalues;   // rad/ns
    Eigen::MatrixXd eigenvectors;  // orthogonal, columns are eigenvectors
    double source_coupling_ghz{0.0};

    Eigen::Index dim() const noexcept { return eigenvalues.size(); }
};

struct JacobiOptions {
    // Sweeps stop once the off-diagonal Frobenius norm falls below
    // tolerance * ||H||_F.
    double tolerance{1e-12};
    int max_sweeps{100};
};

/// Throws InvalidValue if H is not square or not symmetric within 1e-12,
/// ConvergenceFailure if max_sweeps is exhausted.
Eigensystem eig_sym(const Eigen::MatrixXd& h, const JacobiOptions& options = {});

}  // namespace qzsim
